//! Directed-graph algorithms over parent maps, and the compiled model.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};

use thiserror::Error;

use crate::spec::{NodeDecl, NodeKind};

/// Node name → names of its parents.
pub type ParentMap = BTreeMap<String, Vec<String>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cycle {}", cycle.join(" -> "))]
pub struct CycleError {
    pub cycle: Vec<String>,
}

/// A witness cycle if the graph has one.
///
/// The cycle is listed along parent links (each name's successor is one of
/// its parents) and rotated to start at its lexicographically smallest
/// member. Parent names absent from the map's keys are treated as roots.
pub fn detect_cycle(parents: &ParentMap) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }

    let names: BTreeSet<&str> = parents
        .iter()
        .flat_map(|(k, ps)| std::iter::once(k.as_str()).chain(ps.iter().map(String::as_str)))
        .collect();
    let mut marks: HashMap<&str, Mark> = names.iter().map(|n| (*n, Mark::New)).collect();
    let no_parents: Vec<String> = Vec::new();
    let parents_of = |n: &str| parents.get(n).unwrap_or(&no_parents);

    for &root in &names {
        if marks[root] != Mark::New {
            continue;
        }
        // Explicit stack of (node, next parent index) to keep deep graphs off the call stack.
        let mut stack: Vec<(&str, usize)> = vec![(root, 0)];
        marks.insert(root, Mark::Active);
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            let ps = parents_of(node);
            if *next == ps.len() {
                marks.insert(node, Mark::Done);
                stack.pop();
                continue;
            }
            let parent = ps[*next].as_str();
            *next += 1;
            match marks[parent] {
                Mark::New => {
                    marks.insert(parent, Mark::Active);
                    stack.push((parent, 0));
                }
                Mark::Active => {
                    let start = stack.iter().position(|(n, _)| *n == parent).unwrap_or(0);
                    let mut cycle: Vec<String> =
                        stack[start..].iter().map(|(n, _)| n.to_string()).collect();
                    let smallest = (0..cycle.len()).min_by_key(|&i| &cycle[i]).unwrap_or(0);
                    cycle.rotate_left(smallest);
                    return Some(cycle);
                }
                Mark::Done => {}
            }
        }
    }
    None
}

/// Kahn's algorithm; among ready nodes the one declared first goes first.
///
/// Parent names that are not in `nodes` are ignored.
pub fn topo_sort(nodes: &[String], parents: &ParentMap) -> Result<Vec<String>, CycleError> {
    let index: HashMap<&str, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut pending = vec![0usize; nodes.len()];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (child, name) in nodes.iter().enumerate() {
        let distinct: BTreeSet<usize> = parents
            .get(name)
            .into_iter()
            .flatten()
            .filter_map(|p| index.get(p.as_str()).copied())
            .collect();
        pending[child] = distinct.len();
        for p in distinct {
            children[p].push(child);
        }
    }

    let mut ready: BinaryHeap<Reverse<usize>> = (0..nodes.len())
        .filter(|&i| pending[i] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(nodes.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(nodes[i].clone());
        for &c in &children[i] {
            pending[c] -= 1;
            if pending[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }

    if order.len() < nodes.len() {
        let restricted: ParentMap = nodes
            .iter()
            .filter(|n| !order.contains(n))
            .map(|n| {
                let ps = parents.get(n).cloned().unwrap_or_default();
                (n.clone(), ps.into_iter().filter(|p| index.contains_key(p.as_str())).collect())
            })
            .collect();
        let cycle = detect_cycle(&restricted).unwrap_or_default();
        return Err(CycleError { cycle });
    }
    Ok(order)
}

/// Validated model: declarations plus derived structure.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledModel {
    nodes: Vec<NodeDecl>,
    parents: Vec<Vec<String>>,
    topo_order: Vec<String>,
    index: HashMap<String, usize>,
    selection: Option<String>,
    stratify: Option<String>,
    missing_map: BTreeMap<String, String>,
}

impl CompiledModel {
    /// Assemble from declarations whose references are already known to
    /// resolve; fails only on cycles.
    pub(crate) fn assemble(nodes: Vec<NodeDecl>) -> Result<Self, CycleError> {
        let parents: Vec<Vec<String>> = nodes.iter().map(NodeDecl::parent_names).collect();
        let names: Vec<String> = nodes.iter().map(|n| n.name.clone()).collect();
        let map: ParentMap = names.iter().cloned().zip(parents.iter().cloned()).collect();
        let topo_order = topo_sort(&names, &map)?;
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let find = |kind: NodeKind| {
            nodes
                .iter()
                .find(|n| n.kind == kind)
                .map(|n| n.name.clone())
        };
        let missing_map = nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Missing)
            .filter_map(|n| n.underlying.clone().map(|u| (u, n.name.clone())))
            .collect();
        Ok(CompiledModel {
            selection: find(NodeKind::Selection),
            stratify: find(NodeKind::Stratify),
            nodes,
            parents,
            topo_order,
            index,
            missing_map,
        })
    }

    /// Declarations in declaration order.
    pub fn nodes(&self) -> &[NodeDecl] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Option<&NodeDecl> {
        self.index.get(name).map(|&i| &self.nodes[i])
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Parents in first-mention order (empty for unknown names).
    pub fn parents(&self, name: &str) -> &[String] {
        self.index
            .get(name)
            .map(|&i| self.parents[i].as_slice())
            .unwrap_or(&[])
    }

    pub fn parent_map(&self) -> ParentMap {
        self.nodes
            .iter()
            .zip(&self.parents)
            .map(|(n, ps)| (n.name.clone(), ps.clone()))
            .collect()
    }

    /// `(parent, child)` pairs, children in declaration order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        self.nodes
            .iter()
            .zip(&self.parents)
            .flat_map(|(n, ps)| ps.iter().map(move |p| (p.as_str(), n.name.as_str())))
            .collect()
    }

    pub fn topo_order(&self) -> &[String] {
        &self.topo_order
    }

    pub fn selection(&self) -> Option<&str> {
        self.selection.as_deref()
    }

    pub fn stratify(&self) -> Option<&str> {
        self.stratify.as_deref()
    }

    /// Underlying node name → missing node wrapping it.
    pub fn missing_map(&self) -> &BTreeMap<String, String> {
        &self.missing_map
    }

    /// Output columns: observed nodes in topological order.
    pub fn observed_columns(&self) -> Vec<String> {
        self.topo_order
            .iter()
            .filter(|n| self.node(n).is_some_and(|d| d.observed))
            .cloned()
            .collect()
    }

    pub fn into_nodes(self) -> Vec<NodeDecl> {
        self.nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(entries: &[(&str, &[&str])]) -> ParentMap {
        entries
            .iter()
            .map(|(k, ps)| (k.to_string(), ps.iter().map(|p| p.to_string()).collect()))
            .collect()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn acyclic_has_no_witness() {
        assert_eq!(detect_cycle(&map(&[("B", &["A"])])), None);
    }

    #[test]
    fn two_cycle() {
        assert_eq!(
            detect_cycle(&map(&[("A", &["B"]), ("B", &["A"])])),
            Some(names(&["A", "B"]))
        );
    }

    #[test]
    fn three_cycle_matches_enumeration() {
        let parents = map(&[("A", &["C"]), ("B", &["A"]), ("C", &["B"])]);
        // Every ordering of the three names that follows parent links all the
        // way round, normalized to start at the smallest name.
        let mut witnesses = BTreeSet::new();
        for perm in [
            ["A", "B", "C"],
            ["A", "C", "B"],
            ["B", "A", "C"],
            ["B", "C", "A"],
            ["C", "A", "B"],
            ["C", "B", "A"],
        ] {
            let closed = (0..3).all(|i| parents[perm[i]].iter().any(|p| p == perm[(i + 1) % 3]));
            if closed {
                let start = perm.iter().position(|n| *n == "A").unwrap();
                let mut v = perm.to_vec();
                v.rotate_left(start);
                witnesses.insert(v);
            }
        }
        assert_eq!(witnesses.len(), 1);
        let expected: Vec<String> = witnesses.into_iter().next().unwrap().iter().map(|s| s.to_string()).collect();
        assert_eq!(expected, names(&["A", "C", "B"]));
        assert_eq!(detect_cycle(&parents), Some(expected));
    }

    #[test]
    fn self_loop() {
        assert_eq!(detect_cycle(&map(&[("X", &["X"])])), Some(names(&["X"])));
    }

    #[test]
    fn chain_sorts_parents_first() {
        let order = topo_sort(&names(&["C", "B", "A"]), &map(&[("C", &["B"]), ("B", &["A"])])).unwrap();
        assert_eq!(order, names(&["A", "B", "C"]));
    }

    #[test]
    fn ties_follow_declaration_order() {
        let order = topo_sort(&names(&["Y", "X"]), &ParentMap::new()).unwrap();
        assert_eq!(order, names(&["Y", "X"]));
    }

    #[test]
    fn image_graph_order() {
        let parents = map(&[
            ("H", &["U1"]),
            ("C", &["U2"]),
            ("V", &["U1"]),
            ("R", &["C", "H"]),
            ("Y", &["C", "V"]),
            ("Image", &["H", "V", "R", "C"]),
        ]);
        let order = topo_sort(&names(&["U1", "U2", "H", "C", "V", "R", "Y", "Image"]), &parents).unwrap();
        assert_eq!(&order[..2], &names(&["U1", "U2"])[..]);
        assert_eq!(order.last().unwrap(), "Image");
    }

    #[test]
    fn sorting_a_cycle_fails_with_witness() {
        let err = topo_sort(&names(&["A", "B", "C"]), &map(&[("A", &["B"]), ("B", &["A"]), ("C", &["A"])])).unwrap_err();
        assert_eq!(err.cycle, names(&["A", "B"]));
    }

    /// Reachability by repeated relaxation; a cycle exists iff some node
    /// reaches itself.
    fn has_cycle_oracle(n: usize, edges: &[(usize, usize)]) -> bool {
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in edges {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        (0..n).any(|i| reach[i][i])
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..=10).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec((0..n, 0..n), 0..(n * 2)))
        })
    }

    proptest! {
        #[test]
        fn cycle_detection_matches_reachability((n, edges) in arb_graph()) {
            let node_names: Vec<String> = (0..n).map(|i| format!("n{i:02}")).collect();
            let mut parents = ParentMap::new();
            for name in &node_names {
                parents.insert(name.clone(), Vec::new());
            }
            // (parent, child)
            for &(p, c) in &edges {
                parents.get_mut(&node_names[c]).unwrap().push(node_names[p].clone());
            }
            let witness = detect_cycle(&parents);
            prop_assert_eq!(witness.is_some(), has_cycle_oracle(n, &edges));
            if let Some(cycle) = witness {
                for (i, name) in cycle.iter().enumerate() {
                    let next = &cycle[(i + 1) % cycle.len()];
                    prop_assert!(parents[name].contains(next));
                }
                prop_assert_eq!(cycle.iter().min(), cycle.first());
            } else {
                let order = topo_sort(&node_names, &parents).unwrap();
                let pos: HashMap<&String, usize> = order.iter().enumerate().map(|(i, n)| (n, i)).collect();
                prop_assert_eq!(order.len(), n);
                for &(p, c) in &edges {
                    prop_assert!(pos[&node_names[p]] < pos[&node_names[c]]);
                }
            }
        }
    }
}
