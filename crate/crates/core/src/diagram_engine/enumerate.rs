//! Normal-ordering diagrams: one vertex term per insertion, one contraction line per
//! creation/annihilation operator, and a partial matching of the Heisenberg insertions.

use serde::{Deserialize, Serialize};

use super::currents::{expand_current, CurrentKind, Operator, VertexTerm};
use crate::error::{invalid, Error, Result};
use crate::gauss_field::Algebra;

pub const DEFAULT_INSERTION_BOUND: usize = 6;

/// Plain line from the operator of `source` to the exponential(s) of `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub op: Operator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub kinds: Vec<CurrentKind>,
    /// Index of the chosen term in `expand_current(kinds[v])`.
    pub term_indices: Vec<usize>,
    pub vertices: Vec<VertexTerm>,
    pub edges: Vec<Edge>,
    /// Wick-paired Heisenberg insertions `(left, right)` in operator order.
    pub wavy: Vec<(usize, usize)>,
}

impl Diagram {
    pub fn algebra(&self) -> Algebra {
        self.kinds[0].algebra()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn outgoing(&self, v: usize) -> Option<&Edge> {
        self.edges.iter().find(|e| e.source == v)
    }

    /// Heisenberg insertions left unpaired; each contributes the highest weight `p`.
    pub fn unpaired_rho(&self) -> usize {
        let rho = self.vertices.iter().filter(|t| t.has_rho()).count();
        rho - 2 * self.wavy.len()
    }

    /// Every exponential of the diagram as `(vertex, slot index)`; contractions keep them all.
    pub fn exponentials(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.vertices.iter().enumerate().flat_map(|(v, t)| (0..t.slots.len()).map(move |s| (v, s)))
    }
}

fn partial_matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = partial_matchings(rest);
    for (k, &other) in rest.iter().enumerate() {
        let mut remaining = rest.to_vec();
        remaining.remove(k);
        for mut m in partial_matchings(&remaining) {
            m.insert(0, (first, other));
            out.push(m);
        }
    }
    out
}

pub fn enumerate_diagrams(kinds: &[CurrentKind]) -> Result<Vec<Diagram>> {
    enumerate_diagrams_bounded(kinds, DEFAULT_INSERTION_BOUND)
}

pub fn enumerate_diagrams_bounded(kinds: &[CurrentKind], bound: usize) -> Result<Vec<Diagram>> {
    if kinds.len() > bound {
        return Err(Error::TooManyInsertions { found: kinds.len(), bound });
    }
    if let Some(first) = kinds.first() {
        if kinds.iter().any(|k| k.algebra() != first.algebra()) {
            return Err(invalid("insertions", "currents of the J and E/F/H families cannot be mixed"));
        }
    }
    let menus: Vec<Vec<VertexTerm>> = kinds.iter().map(|&k| expand_current(k)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; kinds.len()];
    loop {
        emit_for_choice(kinds, &menus, &choice, &mut out);
        // Odometer over term choices.
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return Ok(out);
            }
            choice[pos] += 1;
            if choice[pos] < menus[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

fn emit_for_choice(kinds: &[CurrentKind], menus: &[Vec<VertexTerm>], choice: &[usize], out: &mut Vec<Diagram>) {
    let vertices: Vec<VertexTerm> = choice.iter().zip(menus).map(|(&c, m)| m[c].clone()).collect();
    if kinds.first().map(|k| k.algebra()) == Some(Algebra::K) && vertices.iter().map(VertexTerm::charge).sum::<i32>() != 0 {
        return;
    }
    let mut options: Vec<Vec<Edge>> = Vec::new();
    for (v, t) in vertices.iter().enumerate() {
        if let Some(op) = t.source() {
            let targets: Vec<Edge> = (0..vertices.len())
                .filter(|&w| op.reaches(v, w) && vertices[w].is_target())
                .map(|w| Edge { source: v, target: w, op })
                .collect();
            if targets.is_empty() {
                return;
            }
            options.push(targets);
        }
    }
    let rho: Vec<usize> = (0..vertices.len()).filter(|&v| vertices[v].has_rho()).collect();
    let matchings = partial_matchings(&rho);
    let mut pick = vec![0usize; options.len()];
    loop {
        let edges: Vec<Edge> = pick.iter().zip(&options).map(|(&k, o)| o[k]).collect();
        for wavy in &matchings {
            out.push(Diagram {
                kinds: kinds.to_vec(),
                term_indices: choice.to_vec(),
                vertices: vertices.clone(),
                edges: edges.clone(),
                wavy: wavy.clone(),
            });
        }
        let mut pos = 0;
        loop {
            if pos == pick.len() {
                return;
            }
            pick[pos] += 1;
            if pick[pos] < options[pos].len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

/// A directed cycle of plain lines, listed from its smallest vertex along the lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub vertices: Vec<usize>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Tree,
    OneLoop(usize),
    /// One loop in each of several connected components.
    Loops(Vec<usize>),
}

/// Cycles of the plain-line graph, one per component at most.
pub fn cycles(d: &Diagram) -> Result<Vec<Cycle>> {
    let n = d.len();
    let mut next = vec![None; n];
    for e in &d.edges {
        if e.source >= n || e.target >= n || e.source == e.target {
            return Err(Error::Invariant(format!("line {e:?} leaves the diagram")));
        }
        if next[e.source].replace(e.target).is_some() {
            return Err(Error::Invariant(format!("vertex {} has two outgoing lines", e.source)));
        }
    }
    // 0 = unvisited, 1 = on the current walk, 2 = finished.
    let mut state = vec![0u8; n];
    let mut found = Vec::new();
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = Some(start);
        while let Some(x) = v {
            match state[x] {
                0 => {
                    state[x] = 1;
                    walk.push(x);
                    v = next[x];
                }
                1 => {
                    let at = walk.iter().position(|&w| w == x).expect("vertex on walk");
                    let mut cyc = walk[at..].to_vec();
                    let min_at = cyc.iter().enumerate().min_by_key(|(_, &w)| w).map(|(k, _)| k).unwrap_or(0);
                    cyc.rotate_left(min_at);
                    found.push(Cycle { vertices: cyc });
                    break;
                }
                _ => break,
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }
    // Each weakly connected component may carry one cycle only.
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in &d.edges {
        let (a, b) = (root(&mut parent, e.source), root(&mut parent, e.target));
        parent[a] = b;
    }
    let mut owners: Vec<usize> = found.iter().map(|c| root(&mut parent, c.vertices[0])).collect();
    owners.sort_unstable();
    if owners.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invariant("two cycles in one connected component".into()));
    }
    Ok(found)
}

pub fn classify(d: &Diagram) -> Result<Topology> {
    let lengths: Vec<usize> = cycles(d)?.iter().map(Cycle::len).collect();
    Ok(match lengths.as_slice() {
        [] => Topology::Tree,
        [k] => Topology::OneLoop(*k),
        _ => Topology::Loops(lengths),
    })
}
