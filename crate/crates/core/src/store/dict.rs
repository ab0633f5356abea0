use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use indexmap::IndexSet;

use crate::error::{decode_error, IndexError, Result};

/// Node and label names with dense 0-based ids in first-seen order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    nodes: IndexSet<String>,
    labels: IndexSet<String>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_node(&mut self, name: &str) -> u32 {
        intern(&mut self.nodes, name) as u32
    }

    pub fn intern_label(&mut self, name: &str) -> usize {
        intern(&mut self.labels, name)
    }

    pub fn node_id(&self, name: &str) -> Option<u32> {
        self.nodes.get_index_of(name).map(|i| i as u32)
    }

    pub fn label_id(&self, name: &str) -> Option<usize> {
        self.labels.get_index_of(name)
    }

    pub fn node(&self, id: u32) -> Option<&str> {
        self.nodes.get_index(id as usize).map(String::as_str)
    }

    pub fn label(&self, id: usize) -> Option<&str> {
        self.labels.get_index(id).map(String::as_str)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub(crate) fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        write_strings(out, &self.nodes)?;
        write_strings(out, &self.labels)
    }

    pub(crate) fn read_from<R: Read>(input: &mut R) -> Result<Self> {
        Ok(Self {
            nodes: read_strings(input)?,
            labels: read_strings(input)?,
        })
    }

    pub(crate) fn serialized_bytes(&self) -> usize {
        let part = |s: &IndexSet<String>| 8 + s.iter().map(|x| 4 + x.len()).sum::<usize>();
        part(&self.nodes) + part(&self.labels)
    }
}

fn intern(set: &mut IndexSet<String>, name: &str) -> usize {
    match set.get_index_of(name) {
        Some(i) => i,
        None => set.insert_full(name.to_string()).0,
    }
}

fn write_strings<W: Write>(out: &mut W, set: &IndexSet<String>) -> io::Result<()> {
    out.write_u64::<LittleEndian>(set.len() as u64)?;
    for s in set {
        out.write_u32::<LittleEndian>(s.len() as u32)?;
        out.write_all(s.as_bytes())?;
    }
    Ok(())
}

fn read_strings<R: Read>(input: &mut R) -> Result<IndexSet<String>> {
    let n = input.read_u64::<LittleEndian>().map_err(decode_error)?;
    let mut set = IndexSet::new();
    for _ in 0..n {
        let len = input.read_u32::<LittleEndian>().map_err(decode_error)? as usize;
        let mut buf = vec![0; len];
        input.read_exact(&mut buf).map_err(decode_error)?;
        let s = String::from_utf8(buf)
            .map_err(|_| IndexError::Corrupt("dictionary entry is not UTF-8".into()))?;
        if !set.insert(s) {
            return Err(IndexError::Corrupt("duplicate dictionary entry".into()).into());
        }
    }
    Ok(set)
}
