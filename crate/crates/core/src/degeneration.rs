//! Configurations of ADE singularities and the degeneration order between
//! them: `T` degenerates to `T'` iff the Dynkin diagram of `T` is an induced
//! subgraph of the Dynkin diagram of `T'`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::singularities::AdeType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegenerationError {
    #[error("cannot parse configuration {0:?}")]
    Parse(String),
}

/// A multiset of ADE types, e.g. `2D4+3A1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SingConfig {
    /// Type -> multiplicity, kept in canonical order.
    parts: BTreeMap<AdeType, u32>,
}

impl SingConfig {
    pub fn new(types: impl IntoIterator<Item = AdeType>) -> Self {
        let mut parts = BTreeMap::new();
        for t in types {
            *parts.entry(t).or_insert(0) += 1;
        }
        SingConfig { parts }
    }

    /// Total Milnor number.
    pub fn milnor(&self) -> u32 {
        self.parts.iter().map(|(t, k)| t.milnor() * k).sum()
    }

    pub fn num_points(&self) -> u32 {
        self.parts.values().sum()
    }

    pub fn types(&self) -> impl Iterator<Item = AdeType> + '_ {
        // canonical order: E, D, A families, larger index first
        let mut v: Vec<(AdeType, u32)> = self.parts.iter().map(|(t, k)| (*t, *k)).collect();
        v.sort_by_key(|(t, _)| std::cmp::Reverse(sort_key(t)));
        v.into_iter().flat_map(|(t, k)| std::iter::repeat_n(t, k as usize))
    }

    pub fn with(&self, t: AdeType) -> Self {
        let mut c = self.clone();
        *c.parts.entry(t).or_insert(0) += 1;
        c
    }

    pub fn graph(&self) -> DynkinGraph {
        DynkinGraph::of_config(self)
    }
}

fn sort_key(t: &AdeType) -> (u32, u32) {
    match *t {
        AdeType::A(n) => (0, n),
        AdeType::D(n) => (1, n),
        AdeType::E(n) => (2, n),
    }
}

impl fmt::Display for SingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut v: Vec<(&AdeType, &u32)> = self.parts.iter().collect();
        v.sort_by_key(|(t, _)| std::cmp::Reverse(sort_key(t)));
        let parts: Vec<String> = v.iter().map(|(t, &k)| if k == 1 { t.to_string() } else { format!("{k}{t}") }).collect();
        write!(f, "{}", parts.join("+"))
    }
}

impl FromStr for SingConfig {
    type Err = DegenerationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DegenerationError::Parse(s.to_string());
        let mut types = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let split = part.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(bad)?;
            let k: u32 = if split == 0 { 1 } else { part[..split].parse().map_err(|_| bad())? };
            let t: AdeType = part[split..].parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            types.extend(std::iter::repeat_n(t, k as usize));
        }
        if types.is_empty() {
            return Err(bad());
        }
        Ok(SingConfig::new(types))
    }
}

impl Serialize for SingConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SingConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Simple undirected graph on at most 64 vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynkinGraph {
    adj: Vec<u64>,
    /// Component id of each vertex.
    component: Vec<usize>,
    /// Type of each component.
    types: Vec<AdeType>,
}

impl DynkinGraph {
    /// Diagram of one ADE type: `A_n` is a path, `D_n` a path on `n-1`
    /// vertices with a leaf at the second vertex, `E_n` a path on `n-1`
    /// vertices with a leaf at the third.
    pub fn edges_of(t: AdeType) -> (usize, Vec<(usize, usize)>) {
        match t {
            AdeType::A(n) => {
                let n = n as usize;
                (n, (1..n).map(|i| (i - 1, i)).collect())
            }
            AdeType::D(n) | AdeType::E(n) => {
                let n = n as usize;
                let branch = if matches!(t, AdeType::D(_)) { 1 } else { 2 };
                let mut e: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
                e.push((branch, n - 1));
                (n, e)
            }
        }
    }

    pub fn of_config(c: &SingConfig) -> Self {
        let mut adj = Vec::new();
        let mut component = Vec::new();
        let mut types = Vec::new();
        for t in c.types() {
            let (n, edges) = Self::edges_of(t);
            let base = adj.len();
            adj.extend(std::iter::repeat_n(0u64, n));
            component.extend(std::iter::repeat_n(types.len(), n));
            for (a, b) in edges {
                adj[base + a] |= 1 << (base + b);
                adj[base + b] |= 1 << (base + a);
            }
            types.push(t);
        }
        assert!(adj.len() <= 64, "diagram too large");
        DynkinGraph { adj, component, types }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn degree(&self, a: usize) -> u32 {
        self.adj[a].count_ones()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.adj.len();
        (0..n).flat_map(|a| (a + 1..n).filter(move |&b| self.has_edge(a, b)).map(move |b| (a, b))).collect()
    }

    fn component_vertices(&self, c: usize) -> Vec<usize> {
        (0..self.adj.len()).filter(|&v| self.component[v] == c).collect()
    }
}

/// Whether the pattern graph on `pv` (vertices of `pat`) embeds as an induced
/// subgraph of `host` restricted to `hv`.
fn induced_embeds(pat: &DynkinGraph, pv: &[usize], host: &DynkinGraph, hv: &[usize]) -> bool {
    if pv.len() > hv.len() {
        return false;
    }
    // order pattern vertices so each one after the first in a component has a
    // mapped neighbor, which prunes early
    let mut order: Vec<usize> = Vec::with_capacity(pv.len());
    let mut placed = vec![false; pat.adj.len()];
    for &s in pv {
        if placed[s] {
            continue;
        }
        let mut stack = vec![s];
        placed[s] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in pv {
                if !placed[w] && pat.has_edge(v, w) {
                    placed[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; pat.adj.len()];
    let mut used = vec![false; host.adj.len()];
    fn rec(k: usize, order: &[usize], pat: &DynkinGraph, host: &DynkinGraph, hv: &[usize], map: &mut [usize], used: &mut [bool]) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for &w in hv {
            if used[w] || host.degree(w) < pat.degree(v) {
                continue;
            }
            let ok = order[..k].iter().all(|&u| pat.has_edge(u, v) == host.has_edge(map[u], w));
            if !ok {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if rec(k + 1, order, pat, host, hv, map, used) {
                return true;
            }
            used[w] = false;
        }
        false
    }
    rec(0, &order, pat, host, hv, &mut map, &mut used)
}

/// Whether configuration `t` degenerates to `t2`. Components of `t` are
/// packed into components of `t2`; each host component must contain its
/// assigned components as an induced subgraph.
pub fn degenerates_to(t: &SingConfig, t2: &SingConfig) -> bool {
    if t.milnor() > t2.milnor() {
        return false;
    }
    let pat = t.graph();
    let host = t2.graph();
    let mut pcs: Vec<usize> = (0..pat.types.len()).collect();
    pcs.sort_by_key(|&c| std::cmp::Reverse(pat.types[c].milnor()));
    let host_sizes: Vec<u32> = host.types.iter().map(|t| t.milnor()).collect();
    let mut assigned: Vec<Vec<usize>> = vec![Vec::new(); host.types.len()];
    let mut memo: HashMap<(usize, Vec<AdeType>), bool> = HashMap::new();

    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        pcs: &[usize],
        pat: &DynkinGraph,
        host: &DynkinGraph,
        host_sizes: &[u32],
        load: &mut Vec<u32>,
        assigned: &mut Vec<Vec<usize>>,
        memo: &mut HashMap<(usize, Vec<AdeType>), bool>,
    ) -> bool {
        if k == pcs.len() {
            return true;
        }
        let c = pcs[k];
        let size = pat.types[c].milnor();
        let mut tried: Vec<(AdeType, Vec<AdeType>)> = Vec::new();
        for h in 0..host_sizes.len() {
            if load[h] + size > host_sizes[h] {
                continue;
            }
            // hosts of the same type with the same load are interchangeable
            let mut cur: Vec<AdeType> = assigned[h].iter().map(|&x| pat.types[x]).collect();
            cur.sort();
            let sig = (host.types[h], cur.clone());
            if tried.contains(&sig) {
                continue;
            }
            tried.push(sig);
            cur.push(pat.types[c]);
            cur.sort();
            let key = (h, cur);
            let fits = match memo.get(&key) {
                Some(&b) => b,
                None => {
                    let mut pv: Vec<usize> = Vec::new();
                    for &x in assigned[h].iter().chain(std::iter::once(&c)) {
                        pv.extend(pat.component_vertices(x));
                    }
                    let b = induced_embeds(pat, &pv, host, &host.component_vertices(h));
                    memo.insert(key, b);
                    b
                }
            };
            if !fits {
                continue;
            }
            assigned[h].push(c);
            load[h] += size;
            if rec(k + 1, pcs, pat, host, host_sizes, load, assigned, memo) {
                return true;
            }
            load[h] -= size;
            assigned[h].pop();
        }
        false
    }
    let mut load = vec![0u32; host_sizes.len()];
    rec(0, &pcs, &pat, &host, &host_sizes, &mut load, &mut assigned, &mut memo)
}

/// Covering relations of the degeneration order on a node set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HasseDiagram {
    pub nodes: Vec<SingConfig>,
    /// `(lower, upper)` index pairs with `lower` covered by `upper`.
    pub edges: Vec<(usize, usize)>,
}

pub fn hasse_diagram(nodes: &[SingConfig]) -> HasseDiagram {
    let n = nodes.len();
    let rel: Vec<Vec<bool>> =
        (0..n).map(|a| (0..n).map(|b| a != b && nodes[a] != nodes[b] && degenerates_to(&nodes[a], &nodes[b])).collect()).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rel[a][b] && !(0..n).any(|c| rel[a][c] && rel[c][b]) {
                edges.push((a, b));
            }
        }
    }
    edges.sort();
    HasseDiagram { nodes: nodes.to_vec(), edges }
}

impl HasseDiagram {
    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges.iter().map(|&(a, b)| (self.nodes[a].to_string(), self.nodes[b].to_string())).collect()
    }

    /// Graphviz rendering with one rank per Milnor level.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph degenerations {\n  rankdir=BT;\n  node [shape=box];\n");
        let mut levels: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.nodes.iter().enumerate() {
            levels.entry(c.milnor()).or_default().push(i);
        }
        for (lvl, ids) in &levels {
            let names: Vec<String> = ids.iter().map(|&i| format!("\"{}\"", self.nodes[i])).collect();
            out.push_str(&format!("  {{ rank=same; /* level {lvl} */ {}; }}\n", names.join("; ")));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", self.nodes[a], self.nodes[b]));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().map(|c| serde_json::json!({"config": c.to_string(), "level": c.milnor()})).collect::<Vec<_>>(),
            "edges": self.edge_names().iter().map(|(a, b)| serde_json::json!([a, b])).collect::<Vec<_>>(),
        })
    }
}

/// Edges of a reference drawing, with a justification for each edge in which
/// it differs from the computed diagram.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ReferenceDiagram {
    pub nodes: Vec<SingConfig>,
    /// `(lower, upper)` pairs.
    pub edges: Vec<(SingConfig, SingConfig)>,
    #[serde(default)]
    pub justifications: Vec<Justification>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Justification {
    pub lower: SingConfig,
    pub upper: SingConfig,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramComparison {
    /// Computed cover edges absent from the reference.
    pub missing_from_reference: Vec<(SingConfig, SingConfig)>,
    /// Reference edges that are not computed cover edges.
    pub extra_in_reference: Vec<(SingConfig, SingConfig)>,
    /// Differences without a justification entry.
    pub unjustified: Vec<(SingConfig, SingConfig)>,
}

impl DiagramComparison {
    pub fn acceptable(&self) -> bool {
        self.unjustified.is_empty()
    }
}

/// The bundled reference drawing of degenerations of cubic threefolds with
/// ADE singularities.
pub fn bundled_reference() -> ReferenceDiagram {
    serde_json::from_str(include_str!("../data/reference_diagram.json")).expect("bundled reference diagram parses")
}

pub fn compare_with_reference(computed: &HasseDiagram, reference: &ReferenceDiagram) -> DiagramComparison {
    let comp: Vec<(SingConfig, SingConfig)> = computed.edges.iter().map(|&(a, b)| (computed.nodes[a].clone(), computed.nodes[b].clone())).collect();
    let missing: Vec<_> = comp.iter().filter(|e| !reference.edges.contains(e)).cloned().collect();
    let extra: Vec<_> = reference.edges.iter().filter(|e| !comp.contains(e)).cloned().collect();
    let unjustified =
        missing.iter().chain(&extra).filter(|(l, u)| !reference.justifications.iter().any(|j| &j.lower == l && &j.upper == u)).cloned().collect();
    DiagramComparison { missing_from_reference: missing, extra_in_reference: extra, unjustified }
}
