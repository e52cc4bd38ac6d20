use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;

use cluster_bounds::bounds::{compare_bounds, nagata_floor, sqrt_bound, theorem_bound, BoundReport};
use cluster_bounds::cluster::{parse_cluster, WeightedCluster};
use cluster_bounds::numerics::{
    exact_string, format_decimal, Enclosure, Precision, PrecisionBudget, Rational, Rounding,
    Verdict,
};
use cluster_bounds::producte::{verify_proposition_with, CheckOutcome, PropositionCertificate};
use cluster_bounds::specialization::{
    simulate_theorem, SpecializationError, StageRecord, MAX_MULTIPLICITY, MAX_POINTS,
};
use cluster_bounds::unloading::{unload, UnloadingStep};

use crate::args::{Cli, Command, Format, GlobalArgs, Policy};
use crate::records::*;

const DIGITS: u32 = 6;

/// How a run ended, before `--strict` is taken into account.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Success,
    Inconclusive,
    Failed,
}

impl Status {
    pub fn exit_code(self, strict: bool) -> u8 {
        match self {
            Status::Success => 0,
            Status::Inconclusive if strict => 3,
            Status::Inconclusive => 0,
            Status::Failed => 1,
        }
    }
}

#[derive(Debug)]
pub struct Report {
    pub output: String,
    pub status: Status,
}

/// A problem with the invocation itself; maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn decimal(q: &Rational) -> String {
    format_decimal(q, DIGITS, Rounding::Nearest)
}

fn lo(e: &Enclosure) -> String {
    format_decimal(e.lower(), DIGITS, Rounding::Down)
}

fn hi(e: &Enclosure) -> String {
    format_decimal(e.upper(), DIGITS, Rounding::Up)
}

fn strings(v: &[BigInt]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

/// Left-aligned columns separated by two spaces.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if k > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            if k + 1 < cells.len() {
                s.extend(std::iter::repeat(' ').take(w - cell.chars().count()));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn budget(global: &GlobalArgs, start_digits: u32) -> Result<PrecisionBudget, UsageError> {
    let cap = Precision::digits(global.precision_cap)
        .map_err(|e| usage(format!("--precision-cap: {e}")))?;
    let start = Precision::digits(start_digits).map_err(|e| usage(format!("--precision: {e}")))?;
    PrecisionBudget::new(start.min(cap), cap).map_err(|e| usage(e.to_string()))
}

fn check_cap(global: &GlobalArgs, flag: &str, value: u64, cap: u64) -> Result<(), UsageError> {
    if value > cap && !global.allow_large {
        return Err(usage(format!(
            "{flag} = {value} exceeds the cap of {cap}; pass --allow-large to proceed"
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Report, UsageError> {
    let g = &cli.global;
    match &cli.command {
        Command::Bound { r, m } => bound(g, *r, *m),
        Command::Sweep { r_min, r_max, m_min, m_max } => {
            sweep(g, *r_min, *r_max, *m_min, m_max.unwrap_or(*m_min))
        }
        Command::Simulate { r, m, trace } => simulate(g, *r, *m, *trace),
        Command::Unload { input, trace, policy } => unload_file(g, input, *trace, *policy),
        Command::VerifyProp { n_min, n_max, precision, terms, verbose } => {
            verify_prop(g, *n_min, *n_max, *precision, *terms, *verbose)
        }
    }
}

fn bound_record(rep: &BoundReport) -> BoundRecord {
    let v = &rep.verdicts;
    BoundRecord {
        r: rep.r,
        m: rep.m,
        paper_bound_exact: exact_string(&rep.paper_bound),
        paper_bound_decimal: decimal(&rep.paper_bound),
        nagata_floor: rep.nagata_floor.to_string(),
        sqrt_bound_lo: lo(&rep.sqrt_bound),
        sqrt_bound_hi: hi(&rep.sqrt_bound),
        improves: rep.improves_on_nagata(),
        vs_nagata: v.vs_nagata.label().into(),
        vs_sqrt_bound: v.vs_sqrt_bound.label().into(),
        xu_sqrt_r_minus_1_lo: lo(&rep.xu_sqrt_r_minus_1),
        xu_sqrt_r_minus_1_hi: hi(&rep.xu_sqrt_r_minus_1),
        vs_xu_sqrt_r_minus_1: v.vs_xu_sqrt_r_minus_1.label().into(),
        xu_shifted_lo: lo(&rep.xu_shifted),
        xu_shifted_hi: hi(&rep.xu_shifted),
        vs_xu_shifted: v.vs_xu_shifted.label().into(),
        evain_applies: rep.evain_applies,
        precision_digits: rep.precision.get(),
    }
}

fn bound(g: &GlobalArgs, r: u64, m: u64) -> Result<Report, UsageError> {
    if r < 2 {
        return Err(usage("--r must be at least 2"));
    }
    if m < 1 {
        return Err(usage("--m must be at least 1"));
    }
    check_cap(g, "--r", r, MAX_POINTS)?;
    check_cap(g, "--m", m, MAX_MULTIPLICITY)?;
    let rep = compare_bounds(r, m, &budget(g, Precision::DEFAULT.get())?);
    let rec = bound_record(&rep);
    let status = if rep.verdicts.all_settled() { Status::Success } else { Status::Inconclusive };
    let output = match g.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&Document::new("bound", vec![rec])),
        Format::Csv => to_csv(&[rec]),
        Format::Table => {
            let rows = vec![
                vec!["bound".into(), format!("{} = {}", rec.paper_bound_decimal, rec.paper_bound_exact)],
                vec!["floor(√r)·m".into(), format!("{}  {}", rec.nagata_floor, rec.vs_nagata)],
                vec!["(√(r−1) − π/8)·m".into(), format!("[{}, {}]  {}", rec.sqrt_bound_lo, rec.sqrt_bound_hi, rec.vs_sqrt_bound)],
                vec!["Xu √(r−1)·m *".into(), format!("[{}, {}]  {}", rec.xu_sqrt_r_minus_1_lo, rec.xu_sqrt_r_minus_1_hi, rec.vs_xu_sqrt_r_minus_1)],
                vec!["Xu √r·m − 1/(2√(r−1)) *".into(), format!("[{}, {}]  {}", rec.xu_shifted_lo, rec.xu_shifted_hi, rec.vs_xu_shifted)],
                vec!["improves on floor(√r)·m".into(), rec.improves.to_string()],
                vec!["Evain's range applies".into(), rec.evain_applies.to_string()],
            ];
            let mut out = format!("r = {r}, m = {m}\n");
            out.push_str(&table(&["quantity", "value  (bound vs quantity)"], &rows));
            let _ = writeln!(out, "* Xu's bounds cover irreducible reduced curves only; shown for comparison.");
            let _ = writeln!(out, "precision: {} digits", rec.precision_digits);
            out
        }
    };
    Ok(Report { output, status })
}

impl From<cluster_bounds::numerics::NumericsError> for UsageError {
    fn from(e: cluster_bounds::numerics::NumericsError) -> Self {
        usage(e.to_string())
    }
}

fn sweep(g: &GlobalArgs, r_min: u64, r_max: u64, m_min: u64, m_max: u64) -> Result<Report, UsageError> {
    if r_min < 2 || r_min > r_max {
        return Err(usage("--r-min and --r-max must satisfy 2 <= r-min <= r-max"));
    }
    if m_min < 1 || m_min > m_max {
        return Err(usage("--m-min and --m-max must satisfy 1 <= m-min <= m-max"));
    }
    check_cap(g, "--r-max", r_max, MAX_POINTS)?;
    check_cap(g, "--m-max", m_max, MAX_MULTIPLICITY)?;
    let p = Precision::DEFAULT.min(Precision::digits(g.precision_cap)?);
    let mut rows = Vec::new();
    for r in r_min..=r_max {
        let unit = theorem_bound(r, 1);
        for m in m_min..=m_max {
            let exact = &unit * Rational::from_integer(m.into());
            let nagata = nagata_floor(r, m);
            let s = sqrt_bound(r, m, p);
            rows.push(SweepRow {
                r,
                m,
                paper_bound_exact: exact_string(&exact),
                paper_bound_decimal: decimal(&exact),
                nagata_floor: nagata.to_string(),
                sqrt_bound_lo: lo(&s),
                sqrt_bound_hi: hi(&s),
                improves: Verdict::exact(&exact, &Rational::from_integer(nagata)) == Verdict::ProvenGreater,
            });
        }
    }
    let output = match g.format.unwrap_or(Format::Csv) {
        Format::Csv => to_csv(&rows),
        Format::Json => to_json(&Document::new("sweep", rows)),
        Format::Table => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|w| {
                    vec![
                        w.r.to_string(),
                        w.m.to_string(),
                        w.paper_bound_decimal.clone(),
                        w.nagata_floor.clone(),
                        format!("[{}, {}]", w.sqrt_bound_lo, w.sqrt_bound_hi),
                        w.improves.to_string(),
                    ]
                })
                .collect();
            table(&["r", "m", "bound", "floor(√r)·m", "(√(r−1) − π/8)·m", "improves"], &cells)
        }
    };
    Ok(Report { output, status: Status::Success })
}

fn step_record(stage: Option<usize>, k: usize, s: &UnloadingStep) -> StepRecord {
    StepRecord {
        stage,
        step: k + 1,
        pivot: s.pivot,
        amount: s.amount.to_string(),
        excess_before: s.excess_before.to_string(),
        excess_after: s.excess_after.to_string(),
    }
}

fn stage_out(s: &StageRecord, trace: bool) -> StageRecordOut {
    let c = &s.checks;
    StageRecordOut {
        stage: s.stage,
        input: strings(&s.input),
        output: strings(&s.output),
        target: exact_string(&s.target),
        target_decimal: decimal(&s.target),
        alpha: exact_string(&s.alpha),
        beta: exact_string(&s.beta),
        checks: StageChecksRecord {
            first_lhs: exact_string(&c.first.lhs),
            first_rhs: exact_string(&c.first.rhs),
            first: c.first.holds(),
            second_lhs: exact_string(&c.second.lhs),
            second_rhs: exact_string(&c.second.rhs),
            second: c.second.holds(),
            proximity_audit: c.proximity_audit.holds(),
            conserved_quantity: c.conserved_quantity,
            coefficient_identity: c.coefficient_identity,
            consistent_output: c.consistent_output,
        },
        steps: trace.then(|| {
            s.trace
                .steps
                .iter()
                .enumerate()
                .map(|(k, st)| step_record(Some(s.stage), k, st))
                .collect()
        }),
    }
}

fn simulate(g: &GlobalArgs, r: u64, m: u64, trace: bool) -> Result<Report, UsageError> {
    if r < 2 {
        return Err(usage("--r must be at least 2"));
    }
    if m < 1 {
        return Err(usage("--m must be at least 1"));
    }
    check_cap(g, "--r", r, MAX_POINTS)?;
    check_cap(g, "--m", m, MAX_MULTIPLICITY)?;
    let theorem = theorem_bound(r, m);
    let rec = match simulate_theorem(r, m) {
        Ok(sim) => SimulateRecord {
            r,
            m,
            stages: sim.stages.iter().map(|s| stage_out(s, trace)).collect(),
            final_first: sim.final_first.to_string(),
            certified_bound: exact_string(&sim.certified_bound),
            certified_bound_decimal: decimal(&sim.certified_bound),
            matches_theorem_bound: sim.certified_bound == theorem,
            certified: sim.certified(),
        },
        Err(SpecializationError::StageFailed { records, .. }) => SimulateRecord {
            r,
            m,
            final_first: records.last().map(|s| s.first.to_string()).unwrap_or_default(),
            stages: records.iter().map(|s| stage_out(s, trace)).collect(),
            certified_bound: exact_string(&theorem),
            certified_bound_decimal: decimal(&theorem),
            matches_theorem_bound: false,
            certified: false,
        },
        Err(e) => return Err(usage(e.to_string())),
    };
    let status = if rec.certified { Status::Success } else { Status::Failed };
    let flat_steps = || -> Vec<StepRecord> {
        rec.stages.iter().flat_map(|s| s.steps.clone().unwrap_or_default()).collect()
    };
    let output = match g.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&Document::new("simulate", vec![rec.clone()])),
        Format::Csv if trace => to_csv(&flat_steps()),
        Format::Csv => to_csv(
            &rec.stages
                .iter()
                .map(|s| StageRow {
                    stage: s.stage,
                    input: s.input.join(" "),
                    output: s.output.join(" "),
                    target: s.target.clone(),
                    target_decimal: s.target_decimal.clone(),
                    first: s.checks.first,
                    second: s.checks.second,
                    proximity_audit: s.checks.proximity_audit,
                    conserved_quantity: s.checks.conserved_quantity,
                    coefficient_identity: s.checks.coefficient_identity,
                    consistent_output: s.checks.consistent_output,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => {
            let mark = |b: bool| if b { "ok" } else { "FAIL" }.to_string();
            let cells: Vec<Vec<String>> = rec
                .stages
                .iter()
                .map(|s| {
                    vec![
                        s.stage.to_string(),
                        format!("({})", s.output.join(", ")),
                        s.target_decimal.clone(),
                        mark(s.checks.first),
                        mark(s.checks.second),
                        mark(s.checks.proximity_audit),
                        mark(s.checks.conserved_quantity),
                        mark(s.checks.consistent_output && s.checks.coefficient_identity),
                    ]
                })
                .collect();
            let mut out = format!("r = {r}, m = {m}\n");
            if !cells.is_empty() {
                out.push_str(&table(
                    &["stage", "output", "target", "first", "second", "audit", "conserved", "consistent"],
                    &cells,
                ));
            }
            if trace {
                for st in flat_steps() {
                    let _ = writeln!(
                        out,
                        "stage {} step {}: pivot {}, n = {}, excess {} -> {}",
                        st.stage.unwrap_or(0), st.step, st.pivot, st.amount, st.excess_before, st.excess_after
                    );
                }
            }
            let _ = writeln!(
                out,
                "m1 = {} >= {} = {}: {}",
                rec.final_first,
                rec.certified_bound_decimal,
                rec.certified_bound,
                if rec.certified { "certified" } else { "NOT certified" }
            );
            out
        }
    };
    Ok(Report { output, status })
}

fn read_input(path: &Path) -> Result<String, UsageError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| usage(format!("--input: cannot read stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| usage(format!("--input {}: {e}", path.display())))
}

fn unload_file(g: &GlobalArgs, input: &Path, trace: bool, policy: Policy) -> Result<Report, UsageError> {
    let text = read_input(input)?;
    let cluster: WeightedCluster =
        parse_cluster(&text).map_err(|e| usage(format!("--input {}: {e}", input.display())))?;
    let (result, steps) = match unload(&cluster, policy.into()) {
        Ok(ok) => ok,
        Err(e) => {
            return Ok(Report {
                output: format!("unloading failed: {e}\n"),
                status: Status::Failed,
            })
        }
    };
    let s = cluster.structure();
    let rec = UnloadRecord {
        points: s.points(),
        proximities: s.pairs().map(|(j, i)| [j, i]).collect(),
        initial: strings(cluster.multiplicities()),
        unloaded: strings(result.multiplicities()),
        excesses: strings(result.excesses().as_slice()),
        consistent: result.is_consistent(),
        steps_taken: steps.steps.len(),
        steps: trace.then(|| {
            steps.steps.iter().enumerate().map(|(k, st)| step_record(None, k, st)).collect()
        }),
    };
    let status = if rec.consistent { Status::Success } else { Status::Failed };
    let output = match g.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&Document::new("unload", vec![rec])),
        Format::Csv if trace => to_csv(rec.steps.as_deref().unwrap_or_default()),
        Format::Csv => to_csv(
            &(0..rec.points)
                .map(|k| PointRow {
                    point: k + 1,
                    initial: rec.initial[k].clone(),
                    unloaded: rec.unloaded[k].clone(),
                    excess: rec.excesses[k].clone(),
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => {
            let mut out = String::new();
            for st in rec.steps.iter().flatten() {
                let _ = writeln!(
                    out,
                    "step {}: pivot {}, n = {}, excess {} -> {}",
                    st.step, st.pivot, st.amount, st.excess_before, st.excess_after
                );
            }
            let _ = writeln!(out, "({})", rec.unloaded.join(", "));
            out
        }
    };
    Ok(Report { output, status })
}

fn prop_status(c: &PropositionCertificate) -> Status {
    if c.exploratory {
        return Status::Success;
    }
    let chain = c.proof_chain.iter().map(|s| s.outcome).fold(CheckOutcome::Pass, CheckOutcome::and);
    match (c.verdict, chain) {
        (Verdict::ProvenGreater, CheckOutcome::Pass) => Status::Success,
        (Verdict::Inconclusive, CheckOutcome::Pass | CheckOutcome::Inconclusive)
        | (Verdict::ProvenGreater, CheckOutcome::Inconclusive) => Status::Inconclusive,
        _ => Status::Failed,
    }
}

fn verify_prop(
    g: &GlobalArgs,
    n_min: u64,
    n_max: u64,
    precision: u32,
    terms: u64,
    verbose: bool,
) -> Result<Report, UsageError> {
    if n_min < 1 || n_min > n_max {
        return Err(usage("--n-min and --n-max must satisfy 1 <= n-min <= n-max"));
    }
    if terms < 1 {
        return Err(usage("--terms must be positive"));
    }
    check_cap(g, "--n-max", n_max, MAX_POINTS)?;
    if precision > g.precision_cap {
        return Err(usage(format!(
            "--precision {precision} exceeds --precision-cap {}",
            g.precision_cap
        )));
    }
    let budget = budget(g, precision)?;
    let certs: Vec<PropositionCertificate> = (n_min..=n_max)
        .map(|n| verify_proposition_with(n, terms, &budget))
        .collect();
    let status = certs.iter().map(prop_status).max().unwrap_or(Status::Success);
    let records: Vec<PropRecord> = certs
        .iter()
        .map(|c| PropRecord {
            n: c.n,
            b_exact: exact_string(&c.b),
            b_decimal: decimal(&c.b),
            rhs_lo: lo(&c.rhs),
            rhs_hi: hi(&c.rhs),
            verdict: c.verdict.label().into(),
            exploratory: c.exploratory,
            chain_passes: c.chain_passes(),
            precision_digits: c.precision.get(),
            proof_chain: verbose.then(|| {
                c.proof_chain
                    .iter()
                    .map(|s| ChainStepRecord { name: s.name.into(), outcome: s.outcome.label().into() })
                    .collect()
            }),
        })
        .collect();
    let output = match g.format.unwrap_or(Format::Table) {
        Format::Json => to_json(&Document::new("verify-prop", records)),
        Format::Csv if verbose => to_csv(
            &certs
                .iter()
                .flat_map(|c| {
                    c.proof_chain.iter().enumerate().map(move |(k, s)| ChainRow {
                        n: c.n,
                        step: k + 1,
                        name: s.name.into(),
                        outcome: s.outcome.label().into(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Format::Csv => to_csv(
            &records
                .into_iter()
                .map(|p| PropRow {
                    n: p.n,
                    b_exact: p.b_exact,
                    b_decimal: p.b_decimal,
                    rhs_lo: p.rhs_lo,
                    rhs_hi: p.rhs_hi,
                    verdict: p.verdict,
                    exploratory: p.exploratory,
                    chain_passes: p.chain_passes,
                    precision_digits: p.precision_digits,
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => {
            let mut out = String::new();
            for p in &records {
                let _ = writeln!(
                    out,
                    "n = {:<4} b = {}  √n − π/8 ∈ [{}, {}]  {}{}",
                    p.n,
                    p.b_decimal,
                    p.rhs_lo,
                    p.rhs_hi,
                    p.verdict,
                    if p.exploratory { "  (exploratory, n < 9)" } else { "" }
                );
                if let Some(chain) = &p.proof_chain {
                    let cells: Vec<Vec<String>> = chain
                        .iter()
                        .map(|s| vec![format!("    {}", s.name), s.outcome.clone()])
                        .collect();
                    out.push_str(&table(&["    step", "outcome"], &cells));
                }
            }
            out
        }
    };
    Ok(Report { output, status })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Success.exit_code(true), 0);
        assert_eq!(Status::Inconclusive.exit_code(false), 0);
        assert_eq!(Status::Inconclusive.exit_code(true), 3);
        assert_eq!(Status::Failed.exit_code(false), 1);
        assert_eq!(Status::Failed.exit_code(true), 1);
        assert_eq!([Status::Success, Status::Failed, Status::Inconclusive].into_iter().max(), Some(Status::Failed));
    }

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bb"], &[vec!["ccc".into(), "d".into()]]);
        assert_eq!(t, "a    bb\nccc  d\n");
    }
}
