//! Seeded random graph generators with planted structure, used by the test
//! suites and for desk-scale runs of the pipeline.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, DocId, GraphBuilder};

/// Undirected simple graph on vertices `0..nodes` plus ground-truth groups.
#[derive(Debug, Clone, Default)]
pub struct SyntheticGraph {
    pub nodes: u32,
    /// Each edge once, `a < b`, sorted.
    pub edges: Vec<(u32, u32)>,
    pub groups: Vec<Vec<u32>>,
}

impl SyntheticGraph {
    fn from_edge_set(nodes: u32, edges: BTreeSet<(u32, u32)>, groups: Vec<Vec<u32>>) -> Self {
        SyntheticGraph {
            nodes,
            edges: edges.into_iter().collect(),
            groups,
        }
    }

    /// Graph corpus in which vertex `i` is document `i` and term `i`.
    pub fn corpus(&self) -> Corpus {
        let mut g = GraphBuilder::new();
        for v in 0..self.nodes {
            g.add_user(&v.to_string());
        }
        for &(a, b) in &self.edges {
            g.add_edge(&a.to_string(), &b.to_string());
        }
        g.build()
    }

    /// SNAP-style edge list. Isolated vertices are not representable.
    pub fn edge_list_text(&self) -> String {
        let mut out = String::from("# synthetic undirected graph\n");
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{a}\t{b}");
        }
        out
    }

    pub fn truth_text(&self) -> String {
        let mut out = String::new();
        for g in &self.groups {
            let line: Vec<String> = g.iter().map(u32::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn add_edge(edges: &mut BTreeSet<(u32, u32)>, a: u32, b: u32) {
    if a != b {
        edges.insert((a.min(b), a.max(b)));
    }
}

/// Erdős–Rényi graph.
pub fn random_graph(nodes: u32, p: f64, seed: u64) -> SyntheticGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = BTreeSet::new();
    for a in 0..nodes {
        for b in a + 1..nodes {
            if rng.gen_bool(p) {
                edges.insert((a, b));
            }
        }
    }
    SyntheticGraph::from_edge_set(nodes, edges, Vec::new())
}

#[derive(Debug, Clone)]
pub struct CliqueInstance {
    pub graph: SyntheticGraph,
    pub clique: Vec<u32>,
}

impl CliqueInstance {
    pub fn clique_ids(&self, corpus: &Corpus) -> Vec<DocId> {
        let mut ids: Vec<DocId> = self
            .clique
            .iter()
            .map(|v| corpus.doc_id(&v.to_string()).expect("clique vertex"))
            .collect();
        ids.sort_unstable();
        ids
    }
}

/// A `clique_size` clique attached to a sparse random background. Each
/// background vertex starts `background_degree` edges to other background
/// vertices; each clique member has exactly one edge into the background.
pub fn clique_with_background(
    clique_size: u32,
    background: u32,
    background_degree: u32,
    seed: u64,
) -> CliqueInstance {
    assert!(background > 1, "background needs at least two vertices");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = clique_size + background;
    let mut all: Vec<u32> = (0..nodes).collect();
    all.shuffle(&mut rng);
    let (clique, rest) = all.split_at(clique_size as usize);
    let mut clique = clique.to_vec();
    clique.sort_unstable();

    let mut edges = BTreeSet::new();
    for (i, &a) in clique.iter().enumerate() {
        for &b in &clique[i + 1..] {
            add_edge(&mut edges, a, b);
        }
        add_edge(&mut edges, a, rest[rng.gen_range(0..rest.len())]);
    }
    for &v in rest {
        for _ in 0..background_degree {
            add_edge(&mut edges, v, rest[rng.gen_range(0..rest.len())]);
        }
    }
    CliqueInstance {
        graph: SyntheticGraph::from_edge_set(nodes, edges, vec![clique.clone()]),
        clique,
    }
}

/// Parameters of the planted-community generator.
#[derive(Debug, Clone)]
pub struct PlantedConfig {
    pub nodes: u32,
    pub groups: u32,
    pub min_group: u32,
    pub max_group: u32,
    /// Edge probability inside a planted group.
    pub p_in: f64,
    /// Random edges started from every ordinary vertex.
    pub background_degree: u32,
    /// High-degree vertices that many ordinary vertices befriend.
    pub hubs: u32,
    /// Probability that an ordinary vertex befriends a given hub.
    pub p_hub: f64,
    /// Pairs of non-adjacent vertices befriending exactly the same hubs and
    /// nothing else, outside every group.
    pub twin_pairs: u32,
    /// Hubs shared by each twin pair.
    pub twin_hubs: u32,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        PlantedConfig {
            nodes: 2000,
            groups: 40,
            min_group: 10,
            max_group: 25,
            p_in: 0.9,
            background_degree: 3,
            hubs: 30,
            p_hub: 0.1,
            twin_pairs: 40,
            twin_hubs: 20,
            seed: 2024,
        }
    }
}

/// Social-network-like graph with planted groups as ground truth.
///
/// Groups are disjoint random vertex sets wired with probability `p_in`.
/// Hubs collect many friends, so pairs sharing only hubs have common
/// neighbours of high degree. Twin pairs are friends of each other and of the
/// same hubs and nothing else: their overlap is large but made entirely of
/// high-degree vertices, and they belong to no group.
pub fn planted_communities(cfg: &PlantedConfig) -> SyntheticGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<u32> = (0..cfg.nodes).collect();
    order.shuffle(&mut rng);

    let hubs: Vec<u32> = order.drain(..cfg.hubs as usize).collect();
    let twins: Vec<u32> = order.drain(..2 * cfg.twin_pairs as usize).collect();
    let ordinary = order;

    let mut edges = BTreeSet::new();
    let mut groups = Vec::with_capacity(cfg.groups as usize);
    let mut pool = ordinary.clone();
    for _ in 0..cfg.groups {
        let size = rng.gen_range(cfg.min_group..=cfg.max_group) as usize;
        if pool.len() < size {
            break;
        }
        let mut group: Vec<u32> = pool.drain(..size).collect();
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                if rng.gen_bool(cfg.p_in) {
                    add_edge(&mut edges, group[i], group[j]);
                }
            }
        }
        group.sort_unstable();
        groups.push(group);
    }

    for &v in &ordinary {
        for _ in 0..cfg.background_degree {
            let u = ordinary[rng.gen_range(0..ordinary.len())];
            add_edge(&mut edges, v, u);
        }
        for &h in &hubs {
            if rng.gen_bool(cfg.p_hub) {
                add_edge(&mut edges, v, h);
            }
        }
    }

    for pair in twins.chunks(2) {
        let shared: Vec<u32> = hubs
            .choose_multiple(&mut rng, cfg.twin_hubs as usize)
            .copied()
            .collect();
        for h in shared {
            add_edge(&mut edges, pair[0], h);
            add_edge(&mut edges, pair[1], h);
        }
    }

    SyntheticGraph::from_edge_set(cfg.nodes, edges, groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = planted_communities(&PlantedConfig::default());
        let b = planted_communities(&PlantedConfig::default());
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.groups, b.groups);
    }

    #[test]
    fn edge_list_text_preserves_neighbourhoods() {
        let g = random_graph(30, 0.3, 5);
        let from_text = Corpus::read_edges(g.edge_list_text().as_bytes()).unwrap();
        let direct = g.corpus();
        let neighbourhood = |c: &Corpus, d: DocId| -> BTreeSet<String> {
            c.doc(d).ids().iter().map(|&t| c.term_label(t).to_owned()).collect()
        };
        for d in from_text.doc_ids() {
            let label = from_text.doc_label(d);
            let other = direct.doc_id(label).unwrap();
            assert_eq!(neighbourhood(&from_text, d), neighbourhood(&direct, other));
        }
    }

    #[test]
    fn clique_is_complete() {
        let inst = clique_with_background(6, 50, 2, 1);
        for (i, &a) in inst.clique.iter().enumerate() {
            for &b in &inst.clique[i + 1..] {
                assert!(inst.graph.edges.binary_search(&(a, b)).is_ok());
            }
        }
    }
}
