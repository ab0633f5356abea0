use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::rpq::{RpqAst, RpqQuery, Term};

/// Edge-labeled graph by node names and `(subject, label, object)` ids.
#[derive(Clone, Debug, Default)]
pub struct OracleGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(usize, String, usize)>,
}

impl OracleGraph {
    pub fn new(nodes: Vec<String>, edges: Vec<(usize, String, usize)>) -> Self {
        Self { nodes, edges }
    }

    fn id(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }
}

#[derive(Clone, Debug)]
enum Move {
    Eps,
    Forward(String),
    Backward(String),
}

/// Thompson automaton over labels and inverse labels.
#[derive(Clone, Debug)]
pub struct Nfa {
    edges: Vec<Vec<(Move, usize)>>,
    start: usize,
    accept: usize,
}

impl Nfa {
    pub fn from_ast(ast: &RpqAst) -> Self {
        let mut nfa = Nfa {
            edges: Vec::new(),
            start: 0,
            accept: 0,
        };
        let (s, e) = nfa.build(ast);
        nfa.start = s;
        nfa.accept = e;
        nfa
    }

    pub fn states(&self) -> usize {
        self.edges.len()
    }

    fn state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn link(&mut self, from: usize, m: Move, to: usize) {
        self.edges[from].push((m, to));
    }

    fn build(&mut self, ast: &RpqAst) -> (usize, usize) {
        let s = self.state();
        let e = self.state();
        match ast {
            RpqAst::Epsilon => self.link(s, Move::Eps, e),
            RpqAst::Label(l) => self.link(s, Move::Forward(l.clone()), e),
            RpqAst::InverseLabel(l) => self.link(s, Move::Backward(l.clone()), e),
            RpqAst::Concat(kids) => {
                let mut prev = s;
                for k in kids {
                    let (ks, ke) = self.build(k);
                    self.link(prev, Move::Eps, ks);
                    prev = ke;
                }
                self.link(prev, Move::Eps, e);
            }
            RpqAst::Alt(kids) => {
                for k in kids {
                    let (ks, ke) = self.build(k);
                    self.link(s, Move::Eps, ks);
                    self.link(ke, Move::Eps, e);
                }
            }
            RpqAst::Star(k) | RpqAst::Plus(k) | RpqAst::Optional(k) => {
                let (ks, ke) = self.build(k);
                self.link(s, Move::Eps, ks);
                self.link(ke, Move::Eps, e);
                if !matches!(ast, RpqAst::Plus(_)) {
                    self.link(s, Move::Eps, e);
                }
                if !matches!(ast, RpqAst::Optional(_)) {
                    self.link(ke, Move::Eps, ks);
                }
            }
        }
        (s, e)
    }
}

/// All `(subject, object)` node-id pairs connected by a path whose label
/// string, over labels and inverse labels, the expression accepts.
/// Constant ends fix that side; an unknown constant matches nothing.
pub fn eval_rpq_oracle(query: &RpqQuery, graph: &OracleGraph) -> BTreeSet<(usize, usize)> {
    let n = graph.nodes.len();
    let resolve = |t: &Term| match t {
        Term::Variable(_) => Ok(None),
        Term::Constant(c) => graph.id(c).map(Some).ok_or(()),
    };
    let (Ok(subject), Ok(object)) = (resolve(&query.subject), resolve(&query.object)) else {
        return BTreeSet::new();
    };
    let nfa = Nfa::from_ast(&query.expr);

    let mut out_edges: HashMap<(usize, &str), Vec<usize>> = HashMap::new();
    let mut in_edges: HashMap<(usize, &str), Vec<usize>> = HashMap::new();
    for (s, l, o) in &graph.edges {
        out_edges.entry((*s, l.as_str())).or_default().push(*o);
        in_edges.entry((*o, l.as_str())).or_default().push(*s);
    }

    let sources: Vec<usize> = match subject {
        Some(s) => vec![s],
        None => (0..n).collect(),
    };
    let mut result = BTreeSet::new();
    // Shared across sources; only the visited entries are reset.
    let mut seen = vec![false; nfa.states() * n];
    let mut visited = Vec::new();
    let mut queue = VecDeque::new();
    for src in sources {
        for i in visited.drain(..) {
            seen[i] = false;
        }
        seen[nfa.start * n + src] = true;
        visited.push(nfa.start * n + src);
        queue.push_back((nfa.start, src));
        while let Some((q, v)) = queue.pop_front() {
            if q == nfa.accept {
                result.insert((src, v));
            }
            for (m, to) in &nfa.edges[q] {
                let targets: &[usize] = match m {
                    Move::Eps => std::slice::from_ref(&v),
                    Move::Forward(l) => out_edges.get(&(v, l.as_str())).map_or(&[], |t| t),
                    Move::Backward(l) => in_edges.get(&(v, l.as_str())).map_or(&[], |t| t),
                };
                for &w in targets {
                    if !seen[to * n + w] {
                        seen[to * n + w] = true;
                        visited.push(to * n + w);
                        queue.push_back((*to, w));
                    }
                }
            }
        }
    }
    let same_var = matches!(
        (&query.subject, &query.object),
        (Term::Variable(a), Term::Variable(b)) if a == b
    );
    result.retain(|&(s, o)| object.is_none_or(|t| t == o) && (!same_var || s == o));
    result
}
