//! Command implementations. Every command returns a serde-serializable
//! report; the binary decides between human and machine rendering.

use crate::fixture::{Fixture, Item, MapDecl, SplittingDecl};
use crate::report::*;
use splitfold::graph::OrientedEdge;
use splitfold::matrix::{bool_exponent, Rational};
use splitfold::morphism::GraphMorphism;
use splitfold::path::EdgePath;
use splitfold::protoforest::{
    blowup_witness, expansion_enumerate, fills, filling_support, overlap_generators, Witness,
};
use splitfold::splitting::FreeSplitting;
use splitfold::subgroup::StallingsGraph;
use splitfold::traintrack::{
    analyze, collapse_invariant_forest, tile_nesting_trace, valence2_homotopy, validate_tt,
    CollapseOutcome, TtValidation,
};
use splitfold::whitehead::free_factor_support;
use splitfold::{Envelope, Error as CoreError};

/// Exit code classification.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

pub fn classify(err: CoreError) -> CliError {
    let code = match err {
        CoreError::ResourceLimit(_) => 3,
        CoreError::PropertyViolation(_) => 4,
        CoreError::Validation(_) | CoreError::Inapplicable(_) | CoreError::NotImplemented(_) => 2,
    };
    CliError {
        code,
        message: err.to_string(),
    }
}

pub fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

type CmdResult<T> = Result<T, CliError>;

fn lookup_path<'a>(fixture: &'a Fixture, name: &str) -> CmdResult<(&'a FreeSplitting, &'a EdgePath)> {
    let (split_name, path) = fixture
        .paths
        .get(name)
        .ok_or_else(|| usage(format!("unknown path {name}")))?;
    let split = fixture
        .splittings
        .get(split_name)
        .ok_or_else(|| usage(format!("dangling splitting reference {split_name}")))?;
    Ok((split, path))
}

fn lookup_map<'a>(fixture: &'a Fixture, name: &str) -> CmdResult<&'a GraphMorphism> {
    fixture
        .maps
        .get(name)
        .ok_or_else(|| usage(format!("unknown map {name}")))
}

fn path_name(fixture: &Fixture, name: &str) -> String {
    fixture
        .paths
        .get(name)
        .map(|(s, _)| s.clone())
        .unwrap_or_default()
}

fn witness_summary(w: &Witness) -> WitnessSummary {
    let total = &w.expansion.total;
    WitnessSummary {
        kind: if w.expansion.is_trivial() {
            "trivial".to_string()
        } else if w.expansion.new_edges.is_empty() {
            "uncollapse".to_string()
        } else {
            "vertex-blowup".to_string()
        },
        total_vertices: total.graph().vertex_count(),
        total_edges: total.graph().edge_count(),
        total_collapsed: total.collapsed().len(),
        new_edges: w.expansion.new_edges.iter().cloned().collect(),
        missing_orbit: w.missing_orbit.display(total.graph()),
        lifted_path: w.lifted.display(total.graph()),
    }
}

pub fn fill_check(fixture: &Fixture, path: &str, env: &Envelope) -> CmdResult<FillCheck> {
    let (split, p) = lookup_path(fixture, path)?;
    let report = fills(split, p, env).map_err(classify)?;
    let nat = split.natural_structure().map_err(classify)?;
    Ok(FillCheck {
        splitting: path_name(fixture, path),
        path: path.to_string(),
        crossing_ok: report.crossing_ok,
        missing_orbits: report
            .missing
            .iter()
            .map(|&i| nat.edges[i].lift.display(split.graph()))
            .collect(),
        support_rank: report.support_rank,
        kurosh: report.kurosh,
        fills: report.fills,
        witness: report.witness.as_ref().map(|w| witness_summary(path, w)),
    })
}

pub fn filling_support_cmd(fixture: &Fixture, path: &str, env: &Envelope) -> CmdResult<SupportReport> {
    let (split, p) = lookup_path(fixture, path)?;
    let fs = filling_support(split, p, env).map_err(classify)?;
    let basis = split.basis();
    Ok(SupportReport {
        subgroup_or_path: path.to_string(),
        rank: fs.support.rank,
        kurosh: fs.kurosh,
        is_proper: fs.support.is_proper,
        factor_generators: fs
            .support
            .factor
            .generators()
            .iter()
            .map(|w| w.display(basis))
            .collect(),
        whitehead_witness: fs.support.witness.iter().map(|a| a.display(basis)).collect(),
    })
}

pub fn subgroup_support(fixture: &Fixture, name: &str, env: &Envelope) -> CmdResult<SupportReport> {
    let (basis, words) = fixture
        .subgroups
        .get(name)
        .ok_or_else(|| usage(format!("unknown subgroup {name}")))?;
    let s = free_factor_support(basis, words, env).map_err(classify)?;
    Ok(SupportReport {
        subgroup_or_path: name.to_string(),
        rank: s.rank,
        kurosh: s.rank,
        is_proper: s.is_proper,
        factor_generators: s.factor.generators().iter().map(|w| w.display(basis)).collect(),
        whitehead_witness: s.witness.iter().map(|a| a.display(basis)).collect(),
    })
}

pub fn overlap_gens(fixture: &Fixture, path: &str) -> CmdResult<OverlapReport> {
    let (split, p) = lookup_path(fixture, path)?;
    let o = overlap_generators(split, p).map_err(classify)?;
    let h = StallingsGraph::fold(split.basis(), &o.generators);
    Ok(OverlapReport {
        path: path.to_string(),
        generators: o.generators.iter().map(|w| w.display(split.basis())).collect(),
        subgroup_rank: h.rank(),
    })
}

/// Serializes a splitting back into fixture syntax under a given name.
pub fn splitting_decl(name: &str, split: &FreeSplitting) -> SplittingDecl {
    let g = split.graph();
    SplittingDecl {
        name: name.to_string(),
        vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
        edges: g
            .edge_ids()
            .map(|e| {
                let (f, t) = g.endpoints(e);
                (
                    g.edge_name(e).to_string(),
                    g.vertex_name(f).to_string(),
                    g.vertex_name(t).to_string(),
                )
            })
            .collect(),
        collapsed: split
            .collapsed()
            .iter()
            .map(|&e| g.edge_name(e).to_string())
            .collect(),
        basis: (0..g.basis().rank()).map(|i| g.basis().name(i).to_string()).collect(),
        marking: g
            .marking()
            .map(|(e, l)| (g.edge_name(e).to_string(), g.basis().display_letter(l)))
            .collect(),
    }
}

pub fn map_decl(name: &str, domain: &str, codomain: &str, f: &GraphMorphism) -> MapDecl {
    let dg = f.domain();
    let cg = f.codomain();
    MapDecl {
        name: name.to_string(),
        domain: domain.to_string(),
        codomain: codomain.to_string(),
        vertices: dg
            .vertices()
            .map(|v| {
                (
                    dg.vertex_name(v).to_string(),
                    cg.vertex_name(f.vertex_image(v)).to_string(),
                )
            })
            .collect(),
        edges: dg
            .edge_ids()
            .map(|e| {
                let img = f.edge_image(OrientedEdge::forward(e));
                (
                    dg.edge_name(e).to_string(),
                    img.edges()
                        .iter()
                        .map(|oe| (cg.edge_name(oe.edge).to_string(), !oe.forward))
                        .collect(),
                )
            })
            .collect(),
    }
}

pub fn fold_factorize_cmd(fixture: &Fixture, map: &str) -> CmdResult<FoldReport> {
    let f = lookup_map(fixture, map)?;
    let seq = splitfold::folds::fold_factorize(f).map_err(classify)?;
    let mut items = Vec::new();
    let mut names = Vec::new();
    for (i, s) in seq.splittings.iter().enumerate() {
        let name = format!("{map}_s{i}");
        items.push(Item::Splitting(splitting_decl(&name, s)));
        names.push(name);
    }
    for (i, fold) in seq.folds.iter().enumerate() {
        items.push(Item::Map(map_decl(
            &format!("{map}_fold{}", i + 1),
            &names[i],
            &names[i + 1],
            fold,
        )));
    }
    let out = Fixture {
        items,
        ..Default::default()
    };
    Ok(FoldReport {
        map: map.to_string(),
        folds: seq.folds.len(),
        splittings: names,
        fixture: crate::fixture::emit(&out),
    })
}

pub fn kr_trace(fixture: &Fixture, map: &str, edge: &str, iterate: usize, env: &Envelope) -> CmdResult<KrTraceReport> {
    let f = lookup_map(fixture, map)?;
    let mut composed = f.clone();
    for _ in 1..iterate.max(1) {
        composed = f.compose_after(&composed).map_err(classify)?;
    }
    let seq = splitfold::folds::fold_factorize(&composed).map_err(classify)?;
    let g = f.domain();
    let e = g
        .edge_by_name(edge)
        .ok_or_else(|| usage(format!("unknown edge {edge}")))?;
    // The requested natural edge, as the chain through valence-two
    // vertices containing the named edge.
    let split = FreeSplitting::new(g.clone(), Default::default()).map_err(classify)?;
    let nat = split.natural_structure().map_err(classify)?;
    let idx = nat
        .class_of
        .get(&e)
        .copied()
        .ok_or_else(|| usage(format!("edge {edge} has no natural class")))?;
    let tile = nat.edges[idx].lift.clone();
    let trace = splitfold::folds::push_tile(&seq, &tile, env).map_err(classify)?;
    Ok(KrTraceReport {
        map: map.to_string(),
        edge: edge.to_string(),
        iterate: iterate.max(1),
        entries: trace
            .entries
            .iter()
            .enumerate()
            .map(|(i, en)| KrEntryReport {
                tile: en.tile.display(seq.splittings[i].graph()),
                support_rank: en.support_rank,
                kurosh: en.kurosh,
            })
            .collect(),
        breakpoints: trace.breakpoints,
    })
}

fn parse_rational(s: &str) -> CmdResult<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: i128 = num.trim().parse().map_err(|_| usage("unreadable nu numerator"))?;
    let den: i128 = den.trim().parse().map_err(|_| usage("unreadable nu denominator"))?;
    Rational::new(num, den).map_err(classify)
}

pub fn tt_analyze(fixture: &Fixture, map: &str, nu: Option<&str>, env: &Envelope) -> CmdResult<TtReport> {
    let f = lookup_map(fixture, map)?;
    let split = FreeSplitting::new(f.domain().clone(), Default::default()).map_err(classify)?;
    let tt = match validate_tt(&split, f).map_err(classify)? {
        TtValidation::Valid(tt) => tt,
        TtValidation::IllegalTurn(t) => {
            return Err(CliError {
                code: 2,
                message: format!("not a train track map: illegal turn {t:?}"),
            })
        }
    };
    let nu = nu.map(parse_rational).transpose()?;
    let report = analyze(&tt, nu, env).map_err(classify)?;
    Ok(TtReport {
        map: map.to_string(),
        lambda_lower: report.lambda.lower.to_string(),
        lambda_upper: report.lambda.upper.to_string(),
        lambda_approx: report.lambda.approx,
        kappa: report.kappa,
        omega: report.omega,
        first_filling: report.first_filling,
        mu: report.mu,
        uniform_crossing: report.uniform_crossing,
        tau_lower: report.tau_lower.map(|r| r.to_string()),
    })
}

pub fn tt_improve(fixture: &Fixture, map: &str) -> CmdResult<ImproveReport> {
    let f = lookup_map(fixture, map)?;
    let mut split = FreeSplitting::new(f.domain().clone(), Default::default()).map_err(classify)?;
    let mut current = f.clone();
    let mut steps = Vec::new();
    loop {
        match collapse_invariant_forest(&split, &current).map_err(classify)? {
            CollapseOutcome::Collapsed {
                split: s2,
                map: m2,
                collapsed_edges,
            } => {
                steps.push(format!("collapsed forest {{{}}}", collapsed_edges.join(" ")));
                split = s2;
                current = m2;
                continue;
            }
            CollapseOutcome::Reducible { invariant_edges } => {
                steps.push(format!(
                    "reducible: invariant subgraph {{{}}} is not a forest",
                    invariant_edges.join(" ")
                ));
                break;
            }
            CollapseOutcome::Irreducible => {}
        }
        match valence2_homotopy(&split, &current, None) {
            Ok(mv) => {
                steps.push(format!(
                    "valence-two homotopy at {} into {}",
                    mv.removed_vertex, mv.merged_edge
                ));
                split = mv.split;
                current = mv.map;
            }
            Err(CoreError::Inapplicable(_)) => break,
            Err(e) => return Err(classify(e)),
        }
    }
    let out = Fixture {
        items: vec![
            Item::Splitting(splitting_decl(&format!("{map}_improved_graph"), &split)),
            Item::Map(map_decl(
                &format!("{map}_improved"),
                &format!("{map}_improved_graph"),
                &format!("{map}_improved_graph"),
                &current,
            )),
        ],
        ..Default::default()
    };
    Ok(ImproveReport {
        map: map.to_string(),
        steps,
        final_vertices: split.graph().vertex_count(),
        final_edges: split.graph().edge_count(),
        fixture: crate::fixture::emit(&out),
    })
}

pub fn expansion_search(fixture: &Fixture, splitting: &str, budget: usize) -> CmdResult<ExpansionSearchReport> {
    let split = fixture
        .splittings
        .get(splitting)
        .ok_or_else(|| usage(format!("unknown splitting {splitting}")))?;
    let stream = expansion_enumerate(split, budget).map_err(classify)?;
    let expansions = stream
        .expansions
        .iter()
        .map(|e| {
            let nat = e.total.natural_structure().map(|n| n.edges.len()).unwrap_or(0);
            ExpansionSummary {
                vertices: e.total.graph().vertex_count(),
                edges: e.total.graph().edge_count(),
                collapsed: e.total.collapsed().len(),
                new_edges: e.new_edges.iter().cloned().collect(),
                natural_edges: nat,
            }
        })
        .collect::<Vec<_>>();
    Ok(ExpansionSearchReport {
        splitting: splitting.to_string(),
        budget,
        count: expansions.len(),
        truncated: stream.truncated,
        expansions,
    })
}

pub fn blowup_witness_cmd(fixture: &Fixture, path: &str, env: &Envelope) -> CmdResult<WitnessSummary> {
    let (split, p) = lookup_path(fixture, path)?;
    let w = blowup_witness(split, p, env).map_err(classify)?;
    Ok(witness_summary(path, &w))
}

pub fn bool_exponent_cmd(m: usize) -> CmdResult<BoolExponentReport> {
    let b = bool_exponent(m).map_err(classify)?;
    Ok(BoolExponentReport {
        m: b.m,
        kappa2: b.kappa2,
        kappa1: b.kappa1,
        wielandt_bound: b.wielandt,
        attaining_rows: b
            .attaining
            .iter()
            .map(|row| {
                (0..b.m)
                    .map(|j| if row & (1 << j) != 0 { '1' } else { '0' })
                    .collect()
            })
            .collect(),
    })
}

pub fn nesting_trace_cmd(
    fixture: &Fixture,
    map: &str,
    edge: &str,
    env: &Envelope,
) -> CmdResult<serde_json::Value> {
    let f = lookup_map(fixture, map)?;
    let split = FreeSplitting::new(f.domain().clone(), Default::default()).map_err(classify)?;
    let tt = match validate_tt(&split, f).map_err(classify)? {
        TtValidation::Valid(tt) => tt,
        TtValidation::IllegalTurn(t) => {
            return Err(CliError {
                code: 2,
                message: format!("not a train track map: illegal turn {t:?}"),
            })
        }
    };
    let g = f.domain();
    let e = g
        .edge_by_name(edge)
        .ok_or_else(|| usage(format!("unknown edge {edge}")))?;
    let nat = split.natural_structure().map_err(classify)?;
    let idx = nat.class_of[&e];
    let trace = tile_nesting_trace(&tt, &nat.edges[idx].lift, None, env).map_err(classify)?;
    Ok(serde_json::json!({
        "map": map,
        "edge": edge,
        "power": trace.power,
        "kurosh_ledger": trace.entries.iter().map(|e| e.kurosh).collect::<Vec<_>>(),
        "tile_lengths": trace.entries.iter().map(|e| e.tile_len).collect::<Vec<_>>(),
        "stabilization_index": trace.stabilization_index,
        "stable_kurosh": trace.stable_kurosh,
        "column_rule_ok": trace.column_rule_ok,
    }))
}
