use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ei_core::View;
use serde::{Deserialize, Serialize};

use crate::Action;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub path: String,
    /// View whose credentials reach this page.
    pub view: View,
    /// Actions the page offers: `read` plus any form actions posting to it.
    pub actions: Vec<Action>,
}

/// A link (`read`) or a form submission (its action).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub action: Action,
}

/// Navigation structure of a target. Nodes are sorted by path, edges by
/// `(from, to, action)`, so equal sites serialize identically.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SiteModel {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub entry_points: BTreeMap<View, String>,
    /// Truncations and skipped links met while crawling.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl SiteModel {
    pub fn node(&self, path: &str) -> Option<&Node> {
        self.nodes.binary_search_by(|n| n.path.as_str().cmp(path)).ok().map(|i| &self.nodes[i])
    }

    /// Link targets from `path`, in edge order.
    pub fn links_from<'a>(&'a self, path: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |e| e.from == path && e.action == Action::Read).map(|e| e.to.as_str())
    }

    pub fn nodes_for(&self, view: View) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.view == view)
    }

    pub fn edges_for(&self, view: View) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| self.node(&e.from).is_some_and(|n| n.view == view))
    }

    pub fn link_count(&self, view: View) -> usize {
        self.edges_for(view).filter(|e| e.action == Action::Read).count()
    }

    pub(crate) fn normalize(&mut self) {
        self.nodes.sort_by(|a, b| a.path.cmp(&b.path));
        self.nodes.dedup_by(|a, b| a.path == b.path);
        for n in &mut self.nodes {
            n.actions.sort();
            n.actions.dedup();
        }
        self.edges.sort();
        self.edges.dedup();
        self.notes.sort();
        self.notes.dedup();
    }

    /// Check the structural invariants: edges connect known nodes, every
    /// entry point exists and every node is reachable from some entry point.
    pub fn validate(&self) -> Result<(), String> {
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if self.node(end).is_none() {
                    return Err(format!("edge endpoint {end} is not a node"));
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        for (view, entry) in &self.entry_points {
            if self.node(entry).is_none() {
                return Err(format!("{view} entry point {entry} is not a node"));
            }
            if seen.insert(entry.as_str()) {
                queue.push_back(entry.as_str());
            }
        }
        while let Some(p) = queue.pop_front() {
            for e in self.edges.iter().filter(|e| e.from == p) {
                if seen.insert(e.to.as_str()) {
                    queue.push_back(e.to.as_str());
                }
            }
        }
        match self.nodes.iter().find(|n| !seen.contains(n.path.as_str())) {
            Some(n) => Err(format!("{} is unreachable from the entry points", n.path)),
            None => Ok(()),
        }
    }
}
