//! The combinatorial edifice of one apartment: R-parabolics under reverse
//! inclusion.

use std::fmt::Write as _;

use serde::Serialize;

use super::{ApartmentData, ConeFan, ParabolicKey};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PosetNode {
    /// `Φ_{λ,≥0}`, which determines the parabolic subgroup.
    pub geq0: Vec<usize>,
    /// The `(P, L)` keys realising this parabolic.
    pub keys: Vec<ParabolicKey>,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ApartmentPoset {
    pub nodes: Vec<PosetNode>,
    /// `(i, j)` with `σᵢ ≤ σⱼ` and `i ≠ j`.
    pub order: Vec<(usize, usize)>,
    /// Covering relations of the order.
    pub hasse: Vec<(usize, usize)>,
    /// Index of the least element `∅` (the group itself).
    pub bottom: usize,
    /// Per node, the atoms below it.
    pub minimal_elements: Vec<Vec<usize>>,
}

impl ApartmentPoset {
    pub fn leq(&self, i: usize, j: usize) -> bool {
        i == j || self.order.contains(&(i, j))
    }

    pub fn atoms(&self) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|&i| i != self.bottom && self.minimal_elements[i] == [i])
            .collect()
    }

    pub fn node_by_label(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label.as_deref() == Some(label))
    }

    pub fn node_name(&self, i: usize) -> String {
        match &self.nodes[i].label {
            Some(l) => l.clone(),
            None => format!("{:?}", self.nodes[i].geq0),
        }
    }

    /// Antisymmetry and transitivity of the stored order.
    pub fn is_partial_order(&self) -> bool {
        let n = self.nodes.len();
        for &(i, j) in &self.order {
            if self.order.contains(&(j, i)) {
                return false;
            }
            for k in 0..n {
                if self.leq(j, k) && !self.leq(i, k) {
                    return false;
                }
            }
        }
        true
    }

    /// Hasse diagram in Graphviz DOT syntax.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", name.replace('"', "'"));
        let _ = writeln!(s, "  rankdir=BT;");
        for i in 0..self.nodes.len() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", self.node_name(i).replace('"', "'"));
        }
        for &(i, j) in &self.hasse {
            let _ = writeln!(s, "  n{i} -> n{j};");
        }
        s.push_str("}\n");
        s
    }
}

/// Builds the poset from the enumerated fan.
///
/// `σ_Q ≤ σ_P` iff `geq0(P) ⊆ geq0(Q)`. Nodes are ordered by their sorted
/// `geq0` index vectors.
pub fn parabolic_poset(a: &ApartmentData, fan: &ConeFan) -> ApartmentPoset {
    let mut nodes: Vec<PosetNode> = Vec::new();
    for key in fan.key_index.keys() {
        match nodes.iter_mut().find(|n| n.geq0 == key.geq0) {
            Some(n) => n.keys.push(key.clone()),
            None => nodes.push(PosetNode {
                geq0: key.geq0.clone(),
                keys: vec![key.clone()],
                label: a.label_of(&key.geq0).map(str::to_string),
            }),
        }
    }
    nodes.sort_by(|x, y| x.geq0.cmp(&y.geq0));
    let n = nodes.len();
    let subset = |x: &[usize], y: &[usize]| x.iter().all(|i| y.contains(i));
    let mut order = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && subset(&nodes[j].geq0, &nodes[i].geq0) {
                order.push((i, j));
            }
        }
    }
    let lt = |i: usize, j: usize| order.contains(&(i, j));
    let mut hasse = Vec::new();
    for &(i, j) in &order {
        if !(0..n).any(|k| lt(i, k) && lt(k, j)) {
            hasse.push((i, j));
        }
    }
    let all: Vec<usize> = (0..a.weights().len()).collect();
    let bottom = nodes
        .iter()
        .position(|x| x.geq0 == all)
        .expect("the zero cocharacter realises the whole group");
    let atoms: Vec<usize> = (0..n)
        .filter(|&i| i != bottom && !(0..n).any(|k| k != bottom && lt(k, i)))
        .collect();
    let minimal_elements = (0..n)
        .map(|i| {
            atoms
                .iter()
                .copied()
                .filter(|&x| x == i || lt(x, i))
                .collect()
        })
        .collect();
    ApartmentPoset {
        nodes,
        order,
        hasse,
        bottom,
        minimal_elements,
    }
}

/// A pair of distinct nodes with the same minimal elements, which shows
/// the poset is not a simplicial complex; `None` if there is no such pair.
///
/// Non-atoms are scanned in node order and paired with the first node
/// sharing their set of minimal elements.
pub fn simplicial_witness(p: &ApartmentPoset) -> Option<(usize, usize)> {
    let atoms = p.atoms();
    for i in 0..p.nodes.len() {
        if i == p.bottom || atoms.contains(&i) {
            continue;
        }
        for j in 0..p.nodes.len() {
            if j != i && j != p.bottom && p.minimal_elements[j] == p.minimal_elements[i] {
                return Some((i, j));
            }
        }
    }
    None
}
