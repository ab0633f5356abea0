//! Packed bitvector with constant-ish time `rank`.
//!
//! Bits are stored LSB-first in 64-bit words: bit `i` of the sequence lives
//! at bit `i % 64` of word `i / 64`. Rank support is two-level:
//!
//! - an absolute `u64` count at every superblock boundary (`2^16` bits),
//! - a relative `u16` count at every block boundary (`s` words), measured
//!   from the start of the enclosing superblock.
//!
//! A query starts from the block sample and popcounts at most `s` full words
//! plus one partial word, so it costs `O(s)` word operations. The overhead is
//! `n/1024 + n/(4s)` bits.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

const WORD_BITS: usize = 64;
const SUPERBLOCK_BITS: usize = 1 << 16;
const SUPERBLOCK_WORDS: usize = SUPERBLOCK_BITS / WORD_BITS;

/// Default number of words between relative samples.
pub const DEFAULT_SAMPLE_WORDS: usize = 4;

/// Growable bit sequence; call [`BitvectorBuilder::finalize`] to get rank support.
#[derive(Clone, Debug, Default)]
pub struct BitvectorBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitvectorBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let off = self.len % WORD_BITS;
        if off == 0 {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << off;
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `word`, most significant of them
    /// first, so `append_bits(0b1000, 4)` appends `1, 0, 0, 0`.
    pub fn append_bits(&mut self, word: u64, count: usize) {
        assert!(
            (1..=WORD_BITS).contains(&count),
            "append_bits: count must be in 1..=64, got {count}"
        );
        // Reverse so the first bit to append sits at bit 0.
        let bits = word.reverse_bits() >> (WORD_BITS - count);
        let off = self.len % WORD_BITS;
        if off == 0 {
            self.words.push(bits);
        } else {
            *self.words.last_mut().unwrap() |= bits << off;
            let spill = off + count;
            if spill > WORD_BITS {
                self.words.push(bits >> (WORD_BITS - off));
            }
        }
        self.len += count;
    }

    /// Builds rank samples with the default sampling rate.
    pub fn finalize(self) -> RankBitvector {
        self.finalize_with(DEFAULT_SAMPLE_WORDS)
    }

    /// Builds rank samples every `sample_words` words.
    pub fn finalize_with(self, sample_words: usize) -> RankBitvector {
        RankBitvector::from_words(self.words, self.len, sample_words)
    }
}

/// Immutable bitvector with rank support.
#[derive(Clone, Debug)]
pub struct RankBitvector {
    words: Vec<u64>,
    len: usize,
    superblocks: Vec<u64>,
    blocks: Vec<u16>,
    sample_words: usize,
}

impl RankBitvector {
    pub fn empty() -> Self {
        Self::from_words(Vec::new(), 0, DEFAULT_SAMPLE_WORDS)
    }

    /// Wraps `words` holding `len` bits. Bits past `len` must be zero.
    pub fn from_words(mut words: Vec<u64>, len: usize, sample_words: usize) -> Self {
        assert!(
            sample_words >= 1 && SUPERBLOCK_WORDS % sample_words == 0,
            "sample rate must divide {SUPERBLOCK_WORDS}"
        );
        words.truncate(len.div_ceil(WORD_BITS));
        words.resize(len.div_ceil(WORD_BITS), 0);
        if len % WORD_BITS != 0 {
            let last = words.last_mut().unwrap();
            *last &= (1u64 << (len % WORD_BITS)) - 1;
        }

        let mut superblocks = Vec::with_capacity(words.len() / SUPERBLOCK_WORDS + 1);
        let mut blocks = Vec::with_capacity(words.len() / sample_words + 1);
        let mut absolute = 0u64;
        let mut relative = 0u64;
        for (w, word) in words.iter().enumerate() {
            if w % SUPERBLOCK_WORDS == 0 {
                superblocks.push(absolute);
                relative = 0;
            }
            if w % sample_words == 0 {
                debug_assert!(relative <= u16::MAX as u64);
                blocks.push(relative as u16);
            }
            let ones = word.count_ones() as u64;
            absolute += ones;
            relative += ones;
        }
        // Sentinel so rank(len) with len on a superblock boundary works.
        superblocks.push(absolute);

        Self {
            words,
            len,
            superblocks,
            blocks,
            sample_words,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn sample_words(&self) -> usize {
        self.sample_words
    }

    /// Total number of 1 bits.
    pub fn count_ones(&self) -> u64 {
        *self.superblocks.last().unwrap()
    }

    /// Bit at 0-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range (len {})",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// Reads `count` bits starting at `i`, first bit as the most significant
    /// of the result (the inverse of [`BitvectorBuilder::append_bits`]). The
    /// range must not cross a word boundary.
    #[inline]
    pub fn read_bits(&self, i: usize, count: usize) -> u64 {
        debug_assert!(i + count <= self.len);
        debug_assert!(i % WORD_BITS + count <= WORD_BITS);
        let raw = (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & low_mask(count);
        raw.reverse_bits() >> (WORD_BITS - count)
    }

    /// Number of 1s among the first `i` bits, `0 <= i <= len`.
    #[inline]
    pub fn rank(&self, i: usize) -> u64 {
        assert!(
            i <= self.len,
            "rank index {i} out of range (len {})",
            self.len
        );
        let word = i / WORD_BITS;
        let sb = word / SUPERBLOCK_WORDS;
        if word == self.words.len() {
            // Only reachable for i == len on a word boundary.
            return self.count_ones();
        }
        let block = word / self.sample_words;
        let mut count = self.superblocks[sb] + self.blocks[block] as u64;
        for w in &self.words[block * self.sample_words..word] {
            count += w.count_ones() as u64;
        }
        let rem = i % WORD_BITS;
        if rem != 0 {
            count += (self.words[word] & low_mask(rem)).count_ones() as u64;
        }
        count
    }

    /// Bytes used by the rank samples (not the payload).
    pub fn sample_bytes(&self) -> usize {
        self.superblocks.len() * 8 + self.blocks.len() * 2
    }

    /// Writes `len` and the word array; samples are rebuilt on load.
    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u64::<LittleEndian>(self.len as u64)?;
        for &w in &self.words {
            out.write_u64::<LittleEndian>(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> io::Result<Self> {
        let len = input.read_u64::<LittleEndian>()? as usize;
        let nwords = len.div_ceil(WORD_BITS);
        let mut words = Vec::with_capacity(nwords);
        for _ in 0..nwords {
            words.push(input.read_u64::<LittleEndian>()?);
        }
        Ok(Self::from_words(words, len, DEFAULT_SAMPLE_WORDS))
    }

    pub fn serialized_bytes(&self) -> usize {
        8 + self.words.len() * 8
    }
}

impl PartialEq for RankBitvector {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for RankBitvector {}

#[inline]
fn low_mask(count: usize) -> u64 {
    if count >= WORD_BITS {
        u64::MAX
    } else {
        (1u64 << count) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn from_bits(bits: &[bool]) -> RankBitvector {
        let mut b = BitvectorBuilder::new();
        for &bit in bits {
            b.push(bit);
        }
        b.finalize()
    }

    fn scan_rank(bits: &[bool], i: usize) -> u64 {
        bits[..i].iter().filter(|&&b| b).count() as u64
    }

    #[test]
    fn append_reads_as_written() {
        let mut b = BitvectorBuilder::new();
        b.append_bits(0b1000, 4);
        assert_eq!(b.len(), 4);
        let bv = b.finalize();
        let bits: Vec<bool> = (0..4).map(|i| bv.get(i)).collect();
        assert_eq!(bits, [true, false, false, false]);
    }

    #[test]
    fn append_twice_concatenates() {
        let mut b = BitvectorBuilder::new();
        b.append_bits(0b1000, 4);
        b.append_bits(0b0011, 4);
        assert_eq!(b.len(), 8);
        let bv = b.finalize();
        let bits: Vec<bool> = (0..8).map(|i| bv.get(i)).collect();
        assert_eq!(bits, [true, false, false, false, false, false, true, true]);
        assert_eq!(bv.read_bits(4, 4), 0b0011);
    }

    #[test]
    fn append_across_word_boundary() {
        let mut b = BitvectorBuilder::new();
        b.append_bits(0, 62);
        b.append_bits(0b1011, 4);
        let bv = b.finalize();
        assert_eq!(bv.len(), 66);
        assert!(bv.get(62) && !bv.get(63) && bv.get(64) && bv.get(65));
        assert_eq!(bv.rank(66), 3);
    }

    #[test]
    #[should_panic]
    fn append_zero_count_is_rejected() {
        BitvectorBuilder::new().append_bits(1, 0);
    }

    #[test]
    fn empty_bitvector() {
        let bv = BitvectorBuilder::new().finalize();
        assert_eq!(bv.len(), 0);
        assert_eq!(bv.rank(0), 0);
    }

    #[test]
    fn all_ones() {
        let bv = from_bits(&[true; 100]);
        assert_eq!(bv.rank(100), 100);
        assert_eq!(bv.count_ones(), 100);
    }

    #[test]
    fn small_rank_and_get() {
        let bv = from_bits(&[true, false, true, true, false, true, false, false]);
        assert_eq!(bv.rank(5), 3);
        assert_eq!(bv.rank(0), 0);
        let b = from_bits(&[true, false, false, false]);
        assert!(b.get(0));
        assert!(!b.get(3));
    }

    #[test]
    #[should_panic]
    fn rank_past_end_panics() {
        from_bits(&[true]).rank(2);
    }

    #[test]
    fn random_100k_samples_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bits: Vec<bool> = (0..100_000).map(|_| rng.gen_bool(0.3)).collect();
        let bv = from_bits(&bits);
        let mut acc = 0;
        for i in 0..=bits.len() {
            assert_eq!(bv.rank(i), acc, "rank({i})");
            if i < bits.len() {
                assert_eq!(bv.get(i), bits[i]);
                acc += bits[i] as u64;
            }
        }
    }

    #[test]
    fn random_million_sampled_positions() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let bv = from_bits(&bits);
        // Prefix sums as the scan oracle.
        let mut prefix = vec![0u64; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + bits[i] as u64;
        }
        for _ in 0..1000 {
            let i = rng.gen_range(0..=n);
            assert_eq!(bv.rank(i), prefix[i]);
        }
        assert_eq!(bv.rank(n), prefix[n]);
    }

    #[test]
    fn dense_superblock_relative_counts_fit() {
        // Every superblock completely full: relative samples reach 2^16 - 256.
        let bits = vec![true; 3 * SUPERBLOCK_BITS + 17];
        let bv = from_bits(&bits);
        for i in (0..=bits.len()).step_by(97) {
            assert_eq!(bv.rank(i), i as u64);
        }
        assert_eq!(bv.rank(bits.len()), bits.len() as u64);
    }

    #[test]
    fn sample_overhead_bound() {
        let n = 1 << 20;
        let bv = from_bits(&vec![false; n]);
        let bound_bits = n / 1024 + n / (4 * DEFAULT_SAMPLE_WORDS) + 128;
        assert!(bv.sample_bytes() * 8 <= bound_bits);
    }

    #[test]
    fn other_sampling_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bits: Vec<bool> = (0..20_000).map(|_| rng.gen_bool(0.1)).collect();
        for s in [1, 2, 8, 16] {
            let mut b = BitvectorBuilder::new();
            bits.iter().for_each(|&x| b.push(x));
            let bv = b.finalize_with(s);
            for i in (0..=bits.len()).step_by(13) {
                assert_eq!(bv.rank(i), scan_rank(&bits, i));
            }
        }
    }

    #[test]
    fn serialization_round_trip() {
        let bv = from_bits(&[true, false, true, true, false, true, false, false, true]);
        let mut buf = Vec::new();
        bv.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), bv.serialized_bytes());
        let back = RankBitvector::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, bv);
        assert_eq!(back.rank(9), 5);
    }

    proptest! {
        #[test]
        fn rank_differences_are_bits(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
            let bv = from_bits(&bits);
            prop_assert_eq!(bv.rank(0), 0);
            for i in 0..bits.len() {
                prop_assert_eq!(bv.rank(i + 1) - bv.rank(i), bits[i] as u64);
            }
            prop_assert_eq!(bv.rank(bits.len()), bv.count_ones());
        }
    }
}
