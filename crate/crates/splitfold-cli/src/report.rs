//! JSON report shapes. Field order is fixed by the struct definitions
//! and all collections are ordered, so serialization is deterministic
//! for fixed inputs and seeds. Timing is reported on stderr in human
//! mode only, keeping the machine output byte-stable.

use serde::Serialize;

#[derive(Serialize)]
pub struct Report<T: Serialize> {
    pub command: String,
    pub result: T,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct FillCheck {
    pub splitting: String,
    pub path: String,
    pub crossing_ok: bool,
    pub missing_orbits: Vec<String>,
    pub support_rank: usize,
    pub kurosh: usize,
    pub fills: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSummary>,
}

#[derive(Serialize)]
pub struct WitnessSummary {
    pub kind: String,
    pub total_vertices: usize,
    pub total_edges: usize,
    pub total_collapsed: usize,
    pub new_edges: Vec<String>,
    pub missing_orbit: String,
    pub lifted_path: String,
}

#[derive(Serialize)]
pub struct SupportReport {
    pub subgroup_or_path: String,
    pub rank: usize,
    pub kurosh: usize,
    pub is_proper: bool,
    pub factor_generators: Vec<String>,
    pub whitehead_witness: Vec<String>,
}

#[derive(Serialize)]
pub struct OverlapReport {
    pub path: String,
    pub generators: Vec<String>,
    pub subgroup_rank: usize,
}

#[derive(Serialize)]
pub struct FoldReport {
    pub map: String,
    pub folds: usize,
    pub splittings: Vec<String>,
    pub fixture: String,
}

#[derive(Serialize)]
pub struct KrTraceReport {
    pub map: String,
    pub edge: String,
    pub iterate: usize,
    pub entries: Vec<KrEntryReport>,
    pub breakpoints: Vec<usize>,
}

#[derive(Serialize)]
pub struct KrEntryReport {
    pub tile: String,
    pub support_rank: usize,
    pub kurosh: usize,
}

#[derive(Serialize)]
pub struct TtReport {
    pub map: String,
    pub lambda_lower: String,
    pub lambda_upper: String,
    pub lambda_approx: f64,
    pub kappa: usize,
    pub omega: usize,
    pub first_filling: Vec<(String, usize)>,
    pub mu: usize,
    pub uniform_crossing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_lower: Option<String>,
}

#[derive(Serialize)]
pub struct ImproveReport {
    pub map: String,
    pub steps: Vec<String>,
    pub final_vertices: usize,
    pub final_edges: usize,
    pub fixture: String,
}

#[derive(Serialize)]
pub struct ExpansionSearchReport {
    pub splitting: String,
    pub budget: usize,
    pub count: usize,
    pub truncated: bool,
    pub expansions: Vec<ExpansionSummary>,
}

#[derive(Serialize)]
pub struct ExpansionSummary {
    pub vertices: usize,
    pub edges: usize,
    pub collapsed: usize,
    pub new_edges: Vec<String>,
    pub natural_edges: usize,
}

#[derive(Serialize)]
pub struct BoolExponentReport {
    pub m: usize,
    pub kappa2: usize,
    pub kappa1: usize,
    pub wielandt_bound: usize,
    pub attaining_rows: Vec<String>,
}

#[derive(Serialize)]
pub struct OracleReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    pub violations: Vec<String>,
}
