//! The plain-text fixture format.
//!
//! Line-oriented, UTF-8, `#` comments. Four declaration kinds:
//!
//! ```text
//! splitting <name>
//! vertices: v0 v1 ...
//! edge <name>: <v> -> <w>
//! collapsed: <edge names>          # optional
//! basis: a b ...
//! marking: <edge>=<letter> ...     # optional; tree edges omitted
//!
//! path <name> in <splitting>: e1 e2^-1 e3 ...
//!
//! map <name>: <G> -> <H>
//! vertex <v> -> <w>
//! edge <e> -> f1 f2^-1 ...         # `1` denotes the trivial path
//!
//! subgroup <name> in F<n>: w1, w2, ...
//! ```
//!
//! Paths are written over edge names; subgroup words over the standard
//! basis letters with `^-1` inverses. When no `marking:` line is given
//! the spanning tree is chosen automatically (preferring collapsed
//! edges, then lexicographically least names). The emitter normalizes
//! whitespace; parse-emit-parse is the identity.

use anyhow::{anyhow, bail, Context, Result};
use splitfold::graph::OrientedEdge;
use splitfold::morphism::GraphMorphism;
use splitfold::path::EdgePath;
use splitfold::splitting::FreeSplitting;
use splitfold::word::{Basis, Word};
use splitfold::MarkedGraph;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// A parsed splitting declaration, kept in file order for round trips.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingDecl {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub collapsed: Vec<String>,
    pub basis: Vec<String>,
    pub marking: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecl {
    pub name: String,
    pub splitting: String,
    pub word: Vec<(String, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDecl {
    pub name: String,
    pub domain: String,
    pub codomain: String,
    pub vertices: Vec<(String, String)>,
    pub edges: Vec<(String, Vec<(String, bool)>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupDecl {
    pub name: String,
    pub rank: usize,
    pub words: Vec<Vec<(String, bool)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Splitting(SplittingDecl),
    Path(PathDecl),
    Map(MapDecl),
    Subgroup(SubgroupDecl),
}

/// A parsed and resolved fixture.
#[derive(Clone, Debug, Default)]
pub struct Fixture {
    pub items: Vec<Item>,
    pub splittings: BTreeMap<String, FreeSplitting>,
    pub paths: BTreeMap<String, (String, EdgePath)>,
    pub maps: BTreeMap<String, GraphMorphism>,
    pub subgroups: BTreeMap<String, (Basis, Vec<Word>)>,
}

fn parse_token_word(tokens: &str) -> Vec<(String, bool)> {
    tokens
        .split_whitespace()
        .map(|tok| match tok.strip_suffix("^-1") {
            Some(t) => (t.to_string(), true),
            None => (tok.to_string(), false),
        })
        .collect()
}

pub fn parse(text: &str) -> Result<Fixture> {
    let mut items: Vec<Item> = Vec::new();
    let mut current: Option<Item> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: &str| anyhow!("line {}: {msg}", lineno + 1);
        let (head, rest) = match line.split_once(|c: char| c.is_whitespace()) {
            Some((h, r)) => (h, r.trim()),
            None => (line, ""),
        };
        match head {
            "splitting" => {
                if rest.is_empty() {
                    return Err(at("splitting needs a name"));
                }
                if let Some(item) = current.take() {
                    items.push(item);
                }
                current = Some(Item::Splitting(SplittingDecl {
                    name: rest.to_string(),
                    vertices: Vec::new(),
                    edges: Vec::new(),
                    collapsed: Vec::new(),
                    basis: Vec::new(),
                    marking: Vec::new(),
                }));
            }
            "vertices:" => match current.as_mut() {
                Some(Item::Splitting(s)) => {
                    s.vertices.extend(rest.split_whitespace().map(|t| t.to_string()));
                }
                _ => return Err(at("vertices: outside a splitting block")),
            },
            "edge" => match current.as_mut() {
                Some(Item::Splitting(s)) => {
                    // edge <name>: <v> -> <w>
                    let (name, arrow) = rest
                        .split_once(':')
                        .ok_or_else(|| at("edge line needs `name: v -> w`"))?;
                    let (v, w) = arrow
                        .split_once("->")
                        .ok_or_else(|| at("edge line needs `v -> w`"))?;
                    s.edges.push((
                        name.trim().to_string(),
                        v.trim().to_string(),
                        w.trim().to_string(),
                    ));
                }
                Some(Item::Map(m)) => {
                    // edge <e> -> word
                    let (e, word) = rest
                        .split_once("->")
                        .ok_or_else(|| at("map edge line needs `e -> word`"))?;
                    let word = word.trim();
                    let parsed = if word == "1" {
                        Vec::new()
                    } else {
                        parse_token_word(word)
                    };
                    m.edges.push((e.trim().to_string(), parsed));
                }
                _ => return Err(at("edge line outside a splitting or map block")),
            },
            "collapsed:" => match current.as_mut() {
                Some(Item::Splitting(s)) => {
                    s.collapsed.extend(rest.split_whitespace().map(|t| t.to_string()));
                }
                _ => return Err(at("collapsed: outside a splitting block")),
            },
            "basis:" => match current.as_mut() {
                Some(Item::Splitting(s)) => {
                    s.basis.extend(rest.split_whitespace().map(|t| t.to_string()));
                }
                _ => return Err(at("basis: outside a splitting block")),
            },
            "marking:" => match current.as_mut() {
                Some(Item::Splitting(s)) => {
                    for tok in rest.split_whitespace() {
                        let (e, l) = tok
                            .split_once('=')
                            .ok_or_else(|| at("marking entries look like edge=letter"))?;
                        s.marking.push((e.to_string(), l.to_string()));
                    }
                }
                _ => return Err(at("marking: outside a splitting block")),
            },
            "path" => {
                if let Some(item) = current.take() {
                    items.push(item);
                }
                // path <name> in <splitting>: word
                let (name, rest2) = rest
                    .split_once(" in ")
                    .ok_or_else(|| at("path line needs `path name in splitting: word`"))?;
                let (splitting, word) = rest2
                    .split_once(':')
                    .ok_or_else(|| at("path line needs a colon before the word"))?;
                items.push(Item::Path(PathDecl {
                    name: name.trim().to_string(),
                    splitting: splitting.trim().to_string(),
                    word: parse_token_word(word),
                }));
            }
            "map" => {
                if let Some(item) = current.take() {
                    items.push(item);
                }
                // map <name>: <G> -> <H>
                let (name, arrow) = rest
                    .split_once(':')
                    .ok_or_else(|| at("map line needs `map name: G -> H`"))?;
                let (g, h) = arrow
                    .split_once("->")
                    .ok_or_else(|| at("map line needs `G -> H`"))?;
                current = Some(Item::Map(MapDecl {
                    name: name.trim().to_string(),
                    domain: g.trim().to_string(),
                    codomain: h.trim().to_string(),
                    vertices: Vec::new(),
                    edges: Vec::new(),
                }));
            }
            "vertex" => match current.as_mut() {
                Some(Item::Map(m)) => {
                    let (v, w) = rest
                        .split_once("->")
                        .ok_or_else(|| at("vertex line needs `v -> w`"))?;
                    m.vertices.push((v.trim().to_string(), w.trim().to_string()));
                }
                _ => return Err(at("vertex line outside a map block")),
            },
            "subgroup" => {
                if let Some(item) = current.take() {
                    items.push(item);
                }
                // subgroup <name> in F<n>: w1, w2
                let (name, rest2) = rest
                    .split_once(" in ")
                    .ok_or_else(|| at("subgroup line needs `subgroup name in Fn: words`"))?;
                let (fn_part, words) = rest2
                    .split_once(':')
                    .ok_or_else(|| at("subgroup line needs a colon before the words"))?;
                let rank: usize = fn_part
                    .trim()
                    .strip_prefix('F')
                    .ok_or_else(|| at("ambient group written as F<n>"))?
                    .parse()
                    .map_err(|_| at("unreadable rank"))?;
                let words = words
                    .split(',')
                    .map(parse_token_word)
                    .filter(|w| !w.is_empty())
                    .collect();
                items.push(Item::Subgroup(SubgroupDecl {
                    name: name.trim().to_string(),
                    rank,
                    words,
                }));
            }
            _ => return Err(at(&format!("unknown directive {head}"))),
        }
    }
    if let Some(item) = current.take() {
        items.push(item);
    }
    resolve(items)
}

fn resolve(items: Vec<Item>) -> Result<Fixture> {
    let mut fixture = Fixture {
        items: items.clone(),
        ..Default::default()
    };
    for item in &items {
        match item {
            Item::Splitting(decl) => {
                let basis = Basis::new(decl.basis.clone())
                    .map_err(|e| anyhow!("splitting {}: {e}", decl.name))?;
                let split = if decl.marking.is_empty() {
                    FreeSplitting::with_auto_marking(
                        decl.vertices.clone(),
                        decl.edges.clone(),
                        &decl.collapsed.iter().cloned().collect(),
                        basis,
                    )
                } else {
                    let graph = MarkedGraph::new(
                        decl.vertices.clone(),
                        decl.edges.clone(),
                        basis,
                        Some(decl.marking.iter().cloned().collect()),
                    )
                    .and_then(|graph| {
                        let mut collapsed = BTreeSet::new();
                        for name in &decl.collapsed {
                            let e = graph.edge_by_name(name).ok_or_else(|| {
                                splitfold::Error::Validation(format!("unknown collapsed edge {name}"))
                            })?;
                            collapsed.insert(e);
                        }
                        FreeSplitting::new(graph, collapsed)
                    });
                    graph
                }
                .map_err(|e| anyhow!("splitting {}: {e}", decl.name))?;
                if fixture.splittings.insert(decl.name.clone(), split).is_some() {
                    bail!("duplicate splitting {}", decl.name);
                }
            }
            Item::Path(decl) => {
                let split = fixture
                    .splittings
                    .get(&decl.splitting)
                    .ok_or_else(|| anyhow!("path {} references unknown splitting {}", decl.name, decl.splitting))?;
                let g = split.graph();
                let mut edges = Vec::new();
                for (name, inv) in &decl.word {
                    let e = g
                        .edge_by_name(name)
                        .ok_or_else(|| anyhow!("path {}: unknown edge {name}", decl.name))?;
                    edges.push(if *inv {
                        OrientedEdge::backward(e)
                    } else {
                        OrientedEdge::forward(e)
                    });
                }
                if edges.is_empty() {
                    bail!("path {} is empty", decl.name);
                }
                let start = g.from(edges[0]);
                let path = EdgePath::immersed(g, start, edges)
                    .map_err(|e| anyhow!("path {}: {e}", decl.name))?;
                split
                    .validate_canonical(&path)
                    .map_err(|e| anyhow!("path {}: {e}", decl.name))?;
                if fixture
                    .paths
                    .insert(decl.name.clone(), (decl.splitting.clone(), path))
                    .is_some()
                {
                    bail!("duplicate path {}", decl.name);
                }
            }
            Item::Map(decl) => {
                let dom = fixture
                    .splittings
                    .get(&decl.domain)
                    .ok_or_else(|| anyhow!("map {} references unknown splitting {}", decl.name, decl.domain))?
                    .graph()
                    .clone();
                let cod = fixture
                    .splittings
                    .get(&decl.codomain)
                    .ok_or_else(|| anyhow!("map {} references unknown splitting {}", decl.name, decl.codomain))?
                    .graph()
                    .clone();
                let mut vmap = BTreeMap::new();
                for (v, w) in &decl.vertices {
                    let vd = dom
                        .vertex_by_name(v)
                        .ok_or_else(|| anyhow!("map {}: unknown domain vertex {v}", decl.name))?;
                    let wc = cod
                        .vertex_by_name(w)
                        .ok_or_else(|| anyhow!("map {}: unknown codomain vertex {w}", decl.name))?;
                    vmap.insert(vd, wc);
                }
                let mut emap = BTreeMap::new();
                for (e, w) in &decl.edges {
                    let ed = dom
                        .edge_by_name(e)
                        .ok_or_else(|| anyhow!("map {}: unknown domain edge {e}", decl.name))?;
                    let mut edges = Vec::new();
                    for (name, inv) in w {
                        let ec = cod
                            .edge_by_name(name)
                            .ok_or_else(|| anyhow!("map {}: unknown codomain edge {name}", decl.name))?;
                        edges.push(if *inv {
                            OrientedEdge::backward(ec)
                        } else {
                            OrientedEdge::forward(ec)
                        });
                    }
                    emap.insert(ed, edges);
                }
                for v in dom.vertices() {
                    if !vmap.contains_key(&v) {
                        bail!("map {}: vertex {} has no image", decl.name, dom.vertex_name(v));
                    }
                }
                for e in dom.edge_ids() {
                    if !emap.contains_key(&e) {
                        bail!("map {}: edge {} has no image", decl.name, dom.edge_name(e));
                    }
                }
                let m = GraphMorphism::from_edge_words(&dom, &cod, vmap, emap)
                    .map_err(|e| anyhow!("map {}: {e}", decl.name))?;
                if fixture.maps.insert(decl.name.clone(), m).is_some() {
                    bail!("duplicate map {}", decl.name);
                }
            }
            Item::Subgroup(decl) => {
                let basis = Basis::standard(decl.rank)
                    .map_err(|e| anyhow!("subgroup {}: {e}", decl.name))?;
                let mut words = Vec::new();
                for w in &decl.words {
                    let mut letters = Vec::new();
                    for (name, inv) in w {
                        let l = basis
                            .letter_by_name(name)
                            .ok_or_else(|| anyhow!("subgroup {}: unknown letter {name}", decl.name))?;
                        letters.push(if *inv { l.inverse() } else { l });
                    }
                    words.push(Word::from_letters(letters));
                }
                if fixture
                    .subgroups
                    .insert(decl.name.clone(), (basis, words))
                    .is_some()
                {
                    bail!("duplicate subgroup {}", decl.name);
                }
            }
        }
    }
    Ok(fixture)
}

fn emit_word(word: &[(String, bool)]) -> String {
    if word.is_empty() {
        return "1".to_string();
    }
    word.iter()
        .map(|(n, inv)| if *inv { format!("{n}^-1") } else { n.clone() })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical re-serialization, whitespace normalized.
pub fn emit(fixture: &Fixture) -> String {
    let mut out = String::new();
    for (i, item) in fixture.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Splitting(s) => {
                writeln!(out, "splitting {}", s.name).unwrap();
                writeln!(out, "vertices: {}", s.vertices.join(" ")).unwrap();
                for (name, v, w) in &s.edges {
                    writeln!(out, "edge {name}: {v} -> {w}").unwrap();
                }
                if !s.collapsed.is_empty() {
                    writeln!(out, "collapsed: {}", s.collapsed.join(" ")).unwrap();
                }
                writeln!(out, "basis: {}", s.basis.join(" ")).unwrap();
                if !s.marking.is_empty() {
                    let entries: Vec<String> =
                        s.marking.iter().map(|(e, l)| format!("{e}={l}")).collect();
                    writeln!(out, "marking: {}", entries.join(" ")).unwrap();
                }
            }
            Item::Path(p) => {
                writeln!(
                    out,
                    "path {} in {}: {}",
                    p.name,
                    p.splitting,
                    emit_word(&p.word)
                )
                .unwrap();
            }
            Item::Map(m) => {
                writeln!(out, "map {}: {} -> {}", m.name, m.domain, m.codomain).unwrap();
                for (v, w) in &m.vertices {
                    writeln!(out, "vertex {v} -> {w}").unwrap();
                }
                for (e, w) in &m.edges {
                    writeln!(out, "edge {e} -> {}", emit_word(w)).unwrap();
                }
            }
            Item::Subgroup(s) => {
                let words: Vec<String> = s.words.iter().map(|w| emit_word(w)).collect();
                writeln!(out, "subgroup {} in F{}: {}", s.name, s.rank, words.join(", ")).unwrap();
            }
        }
    }
    out
}

pub fn load(path: &std::path::Path) -> Result<Fixture> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading fixture {}", path.display()))?;
    parse(&text)
}
