//! Subcommand implementations. Each builds a serializable report plus its
//! CSV rendering and hands both to the emitter.

use rand::Rng;
use serde::Serialize;
use serde_json::Value;

use privcomm::infotheory::ProbDist;
use privcomm::model::{CommMatrix, DeterministicProtocol, QuantumProtocol};
use privcomm::oracle::{largest_correct_rectangle, max_monochromatic_width, MonochromaticRectangle, RectangleStat};
use privcomm::privacy::{max_privacy_loss, privacy_report, PrivacyReport};
use privcomm::protocols::{
    and_analysis, and_protocol_with_rounds, and_round_count, disjointness_analysis,
    disjointness_matrix, disjointness_protocol, disjointness_transcript_loss, idmin_leaky_uniform,
    idmin_matrix, idmin_private, Cut, GroverStagePlan,
};
use privcomm::random::rng_from_seed;
use privcomm::structure::{
    corners_check, synthesize_private_protocol, xor_decompose, CornersViolation, ForbiddenWitness,
    SynthesisError, XorDecomposition,
};
use privcomm::{tol, Error, Result};

use crate::args::{AnalyzeArgs, OutputArgs, PaperArgs, PrivacyArgs, SweepArgs};
use crate::input;
use crate::output::{self, fin, join, kv_csv};

/// Largest universe size for which the privacy-loss enumeration over
/// transcript distributions is run automatically.
const DISJ_LOSS_MAX_N: usize = 8;

fn require<T: Copy>(opt: Option<T>, flag: &str, ctx: &str) -> Result<T> {
    opt.ok_or_else(|| Error::InvalidArgument(format!("{ctx} needs {flag}")))
}

fn require_list<'a>(opt: &'a Option<String>, flag: &str, ctx: &str) -> Result<&'a str> {
    opt.as_deref().ok_or_else(|| Error::InvalidArgument(format!("{ctx} needs {flag}")))
}

fn reject<T>(opt: &Option<T>, flag: &str, ctx: &str) -> Result<()> {
    if opt.is_some() {
        return Err(Error::InvalidArgument(format!("{flag} does not apply to {ctx}")));
    }
    Ok(())
}

fn parse_single_usize(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{what}: cannot parse `{s}` as an integer")))
}

fn emit<T: Serialize>(report: &T, csv: String, output: &OutputArgs) -> Result<()> {
    output::emit(report, csv, output.format, output.out.as_deref())
}

#[derive(Serialize)]
struct ProtocolSummary {
    rounds: usize,
    communication_bits: usize,
    tree: Value,
}

#[derive(Serialize)]
struct ValueRectangle {
    value: usize,
    #[serde(flatten)]
    rect: RectangleStat,
}

#[derive(Serialize)]
struct RectangleReport {
    epsilon: f64,
    widest_monochromatic: MonochromaticRectangle,
    heaviest_correct: Vec<ValueRectangle>,
}

#[derive(Serialize)]
struct AnalyzeReport {
    rows: usize,
    cols: usize,
    alphabet: Vec<usize>,
    private: bool,
    witness: Option<ForbiddenWitness>,
    corners_violation: Option<CornersViolation>,
    xor_decomposition: Option<XorDecomposition>,
    protocol: Option<ProtocolSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rectangles: Option<RectangleReport>,
}

fn analyze_csv(report: &AnalyzeReport) -> String {
    let blank = String::new;
    let mut rows: Vec<(String, String)> = vec![
        ("rows".into(), report.rows.to_string()),
        ("cols".into(), report.cols.to_string()),
        ("alphabet".into(), join(&report.alphabet)),
        ("private".into(), report.private.to_string()),
        (
            "witness_rows".into(),
            report.witness.as_ref().map_or_else(blank, |w| join(&w.rows)),
        ),
        (
            "witness_cols".into(),
            report.witness.as_ref().map_or_else(blank, |w| join(&w.cols)),
        ),
        (
            "corners_rows".into(),
            report.corners_violation.as_ref().map_or_else(blank, |c| join(&c.rows)),
        ),
        (
            "corners_cols".into(),
            report.corners_violation.as_ref().map_or_else(blank, |c| join(&c.cols)),
        ),
        (
            "xor_row_bits".into(),
            report.xor_decomposition.as_ref().map_or_else(blank, |d| join(&d.row_bits)),
        ),
        (
            "xor_col_bits".into(),
            report.xor_decomposition.as_ref().map_or_else(blank, |d| join(&d.col_bits)),
        ),
        (
            "protocol_rounds".into(),
            report.protocol.as_ref().map_or_else(blank, |p| p.rounds.to_string()),
        ),
        (
            "protocol_communication_bits".into(),
            report.protocol.as_ref().map_or_else(blank, |p| p.communication_bits.to_string()),
        ),
    ];
    if let Some(r) = &report.rectangles {
        rows.push(("rectangle_epsilon".into(), r.epsilon.to_string()));
        rows.push(("widest_monochromatic_value".into(), r.widest_monochromatic.value.to_string()));
        rows.push(("widest_monochromatic_width".into(), r.widest_monochromatic.width.to_string()));
        for v in &r.heaviest_correct {
            rows.push((format!("heaviest_correct_{}_mass", v.value), v.rect.mass.to_string()));
            rows.push((
                format!("heaviest_correct_{}_error_mass", v.value),
                v.rect.error_mass.to_string(),
            ));
        }
    }
    kv_csv(&rows)
}

pub fn analyze_matrix(args: &AnalyzeArgs) -> Result<()> {
    let f = input::load_matrix(&args.matrix)?;
    if args.epsilon.is_none() && args.dist.is_some() {
        return Err(Error::InvalidArgument(
            "--dist only affects the --epsilon rectangle report".into(),
        ));
    }
    let (private, witness, protocol) = match synthesize_private_protocol(&f) {
        Ok(p) => {
            let summary = ProtocolSummary {
                rounds: p.max_rounds()?,
                communication_bits: p.max_bits()?,
                tree: output::tree_json(&p),
            };
            (true, None, Some(summary))
        }
        Err(SynthesisError::NotPrivate(w)) => (false, Some(w), None),
        Err(SynthesisError::Build(e)) => return Err(e),
    };
    let rectangles = match args.epsilon {
        None => None,
        Some(eps) => {
            let mu = match &args.dist {
                Some(path) => input::load_dist(path, f.rows(), f.cols())?,
                None => ProbDist::uniform_grid(&[f.rows(), f.cols()])?,
            };
            let widest_monochromatic = max_monochromatic_width(&f)?;
            let mut heaviest_correct = Vec::new();
            for value in f.alphabet() {
                let rect = largest_correct_rectangle(&f, &mu, value, eps)?;
                fin("rectangle mass", rect.mass)?;
                fin("rectangle error mass", rect.error_mass)?;
                heaviest_correct.push(ValueRectangle { value, rect });
            }
            Some(RectangleReport {
                epsilon: fin("epsilon", eps)?,
                widest_monochromatic,
                heaviest_correct,
            })
        }
    };
    let report = AnalyzeReport {
        rows: f.rows(),
        cols: f.cols(),
        alphabet: f.alphabet(),
        private,
        witness,
        corners_violation: corners_check(&f)?,
        xor_decomposition: xor_decompose(&f),
        protocol,
        rectangles,
    };
    let csv = analyze_csv(&report);
    emit(&report, csv, &args.output)
}

fn check_privacy_report(report: &PrivacyReport) -> Result<()> {
    fin("max_loss_bits", report.max_loss_bits)?;
    fin("max_leakage", report.max_leakage)?;
    for r in &report.per_round {
        fin("privacy_loss_bits", r.privacy_loss_bits)?;
        fin("leakage_trace_norm", r.leakage_trace_norm)?;
        fin("expected_leakage", r.expected_leakage)?;
    }
    Ok(())
}

fn privacy_csv(report: &PrivacyReport) -> String {
    let mut csv = String::from("round,player,privacy_loss_bits,leakage_trace_norm,expected_leakage\n");
    for r in &report.per_round {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.round, r.player, r.privacy_loss_bits, r.leakage_trace_norm, r.expected_leakage
        ));
    }
    csv
}

enum Proto {
    Classical(DeterministicProtocol),
    Quantum(QuantumProtocol),
}

pub fn privacy(args: &PrivacyArgs) -> Result<()> {
    let budget = |p: QuantumProtocol| -> Result<QuantumProtocol> {
        match args.budget_qubits {
            None => Ok(p),
            Some(q) => {
                if !(1..=62).contains(&q) {
                    return Err(Error::InvalidArgument(format!(
                        "--budget-qubits must be between 1 and 62, got {q}"
                    )));
                }
                Ok(p.with_budgets(1usize << q, tol::DEFAULT_BRANCH_BUDGET))
            }
        }
    };
    let (proto, f, desc) = match args.protocol.as_str() {
        "and" => {
            reject(&args.n, "--n", "and")?;
            reject(&args.matrix, "--matrix", "named constructions")?;
            let delta = require(args.delta, "--delta", "and")?;
            let rounds = match &args.stages {
                Some(s) => parse_single_usize(s, "--stages")?,
                None => and_round_count(delta)?,
            };
            let p = budget(and_protocol_with_rounds(delta, rounds)?)?;
            let f = CommMatrix::from_fn(2, 2, |x, y| x & y);
            (Proto::Quantum(p), f, format!("and(delta={delta}, rounds={rounds})"))
        }
        "idmin-private" => {
            reject(&args.delta, "--delta", "idmin-private")?;
            reject(&args.stages, "--stages", "idmin-private")?;
            reject(&args.budget_qubits, "--budget-qubits", "classical protocols")?;
            reject(&args.matrix, "--matrix", "named constructions")?;
            let n = require(args.n, "--n", "idmin-private")?;
            (Proto::Classical(idmin_private(n)?), idmin_matrix(n)?, format!("idmin-private(n={n})"))
        }
        "idmin-leaky" => {
            reject(&args.stages, "--stages", "idmin-leaky")?;
            reject(&args.budget_qubits, "--budget-qubits", "classical protocols")?;
            reject(&args.matrix, "--matrix", "named constructions")?;
            let n = require(args.n, "--n", "idmin-leaky")?;
            let delta = require(args.delta, "--delta", "idmin-leaky")?;
            (
                Proto::Classical(idmin_leaky_uniform(n, delta)?),
                idmin_matrix(n)?,
                format!("idmin-leaky(n={n}, delta={delta})"),
            )
        }
        "disj" => {
            reject(&args.delta, "--delta", "disj")?;
            reject(&args.matrix, "--matrix", "named constructions")?;
            let n = require(args.n, "--n", "disj")?;
            let plan = match &args.stages {
                Some(s) => Some(input::stage_plan(n, s)?),
                None => None,
            };
            let desc = match &plan {
                Some(p) => format!("disj(n={n}, stages={})", join(&p.stage_iterations)),
                None => format!("disj(n={n})"),
            };
            let p = budget(disjointness_protocol(n, plan)?)?;
            (Proto::Quantum(p), disjointness_matrix(n)?, desc)
        }
        path => {
            reject(&args.n, "--n", "file-based protocols")?;
            reject(&args.delta, "--delta", "file-based protocols")?;
            reject(&args.stages, "--stages", "file-based protocols")?;
            reject(&args.budget_qubits, "--budget-qubits", "classical protocols")?;
            let matrix_path = args.matrix.as_ref().ok_or_else(|| {
                Error::InvalidArgument("file-based protocols need --matrix".into())
            })?;
            let p = input::load_tree(std::path::Path::new(path))?;
            let f = input::load_matrix(matrix_path)?;
            if p.n_x() != f.rows() || p.n_y() != f.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "protocol inputs {}x{} vs matrix {}x{}",
                    p.n_x(),
                    p.n_y(),
                    f.rows(),
                    f.cols()
                )));
            }
            (Proto::Classical(p), f, path.to_string())
        }
    };
    let (mu, dist_desc) = match &args.dist {
        Some(path) => (input::load_dist(path, f.rows(), f.cols())?, path.display().to_string()),
        None => (ProbDist::uniform_grid(&[f.rows(), f.cols()])?, "uniform".to_string()),
    };
    let report = match &proto {
        Proto::Classical(p) => privacy_report(p, &mu, &f, &desc, &dist_desc)?,
        Proto::Quantum(p) => privacy_report(p, &mu, &f, &desc, &dist_desc)?,
    };
    check_privacy_report(&report)?;
    let csv = privacy_csv(&report);
    emit(&report, csv, &args.output)
}

#[derive(Serialize)]
struct AndReport {
    delta: f64,
    rounds: usize,
    success_probability: f64,
    error_probability: f64,
    abort_probability: f64,
    bob_round_leakage: f64,
    al_round_leakage: f64,
    qubits_sent: usize,
}

fn and_report(delta: f64) -> Result<AndReport> {
    let a = and_analysis(delta)?;
    Ok(AndReport {
        delta: fin("delta", a.delta)?,
        rounds: a.rounds,
        success_probability: fin("success_probability", a.success_probability)?,
        error_probability: fin("error_probability", 1.0 - a.success_probability)?,
        abort_probability: fin("abort_probability", a.abort_probability)?,
        bob_round_leakage: fin("bob_round_leakage", a.bob_round_leakage)?,
        al_round_leakage: fin("al_round_leakage", a.al_round_leakage)?,
        qubits_sent: a.qubits_sent,
    })
}

fn and_csv_line(r: &AndReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}\n",
        r.delta,
        r.rounds,
        r.success_probability,
        r.error_probability,
        r.abort_probability,
        r.bob_round_leakage,
        r.al_round_leakage,
        r.qubits_sent
    )
}

const AND_CSV_HEADER: &str = "delta,rounds,success_probability,error_probability,\
                              abort_probability,bob_round_leakage,al_round_leakage,qubits_sent\n";

#[derive(Serialize)]
struct IdminPrivateReport {
    n: usize,
    error_uniform: f64,
    max_privacy_loss_bits: f64,
    rounds_worst_case: usize,
    communication_bits_worst_case: usize,
}

fn idmin_private_report(n: usize) -> Result<IdminPrivateReport> {
    let p = idmin_private(n)?;
    let f = idmin_matrix(n)?;
    let mu = ProbDist::uniform_grid(&[f.rows(), f.cols()])?;
    Ok(IdminPrivateReport {
        n,
        error_uniform: fin("error_uniform", p.error_on(&f, &mu)?)?,
        max_privacy_loss_bits: fin("max_privacy_loss_bits", max_privacy_loss(&p, &mu, &f)?)?,
        rounds_worst_case: p.max_rounds()?,
        communication_bits_worst_case: p.max_bits()?,
    })
}

fn idmin_private_csv_line(r: &IdminPrivateReport) -> String {
    format!(
        "{},{},{},{},{}\n",
        r.n,
        r.error_uniform,
        r.max_privacy_loss_bits,
        r.rounds_worst_case,
        r.communication_bits_worst_case
    )
}

const IDMIN_PRIVATE_CSV_HEADER: &str =
    "n,error_uniform,max_privacy_loss_bits,rounds_worst_case,communication_bits_worst_case\n";

#[derive(Serialize)]
struct IdminLeakyReport {
    n: usize,
    delta: f64,
    error_uniform: f64,
    error_bound: f64,
    max_expected_leakage: f64,
    expected_leakage_bound: f64,
    max_leakage: f64,
    max_privacy_loss_bits: f64,
    rounds_worst_case: usize,
    communication_bits_worst_case: usize,
    communication_bound_bits: f64,
}

fn idmin_leaky_report(n: usize, delta: f64) -> Result<IdminLeakyReport> {
    let p = idmin_leaky_uniform(n, delta)?;
    let f = idmin_matrix(n)?;
    let mu = ProbDist::uniform_grid(&[f.rows(), f.cols()])?;
    let rep = privacy_report(&p, &mu, &f, "idmin-leaky", "uniform")?;
    check_privacy_report(&rep)?;
    let max_expected = rep.per_round.iter().map(|r| r.expected_leakage).fold(0.0_f64, f64::max);
    let nf = n as f64;
    Ok(IdminLeakyReport {
        n,
        delta,
        error_uniform: fin("error_uniform", p.error_on(&f, &mu)?)?,
        error_bound: delta / 4.0,
        max_expected_leakage: max_expected,
        expected_leakage_bound: delta / (8.0 * nf),
        max_leakage: rep.max_leakage,
        max_privacy_loss_bits: rep.max_loss_bits,
        rounds_worst_case: p.max_rounds()?,
        communication_bits_worst_case: p.max_bits()?,
        communication_bound_bits: fin(
            "communication_bound_bits",
            2.0 * nf.powi(3) / delta * (1.0 / delta).log2(),
        )?,
    })
}

fn idmin_leaky_csv_line(r: &IdminLeakyReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}\n",
        r.n,
        r.delta,
        r.error_uniform,
        r.error_bound,
        r.max_expected_leakage,
        r.expected_leakage_bound,
        r.max_leakage,
        r.max_privacy_loss_bits,
        r.rounds_worst_case,
        r.communication_bits_worst_case,
        r.communication_bound_bits
    )
}

const IDMIN_LEAKY_CSV_HEADER: &str =
    "n,delta,error_uniform,error_bound,max_expected_leakage,expected_leakage_bound,max_leakage,\
     max_privacy_loss_bits,rounds_worst_case,communication_bits_worst_case,\
     communication_bound_bits\n";

#[derive(Serialize)]
struct SampledError {
    trials: usize,
    seed: u64,
    max_error_probability: f64,
    mean_error_probability: f64,
}

#[derive(Serialize)]
struct DisjReport {
    n: usize,
    stage_iterations: Vec<usize>,
    total_iterations: usize,
    register_dim: usize,
    qubits_per_message: usize,
    communication_qubits: usize,
    delta: f64,
    max_error_probability: f64,
    min_message_overlap: f64,
    error_by_overlap: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    measurement_cut_loss_bits: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_measurement_cut_loss_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loss_budget_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<SampledError>,
}

fn disj_report(
    n: usize,
    plan: Option<GroverStagePlan>,
    trials: Option<(usize, u64)>,
) -> Result<DisjReport> {
    let analysis = disjointness_analysis(n, plan)?;
    let plan = analysis.plan.clone();
    let mut max_error = 0.0_f64;
    for (k, &e) in analysis.error_by_overlap.iter().enumerate() {
        max_error = max_error.max(fin(&format!("error_by_overlap[{k}]"), e)?);
    }
    let qubits_per_message = (usize::BITS - (plan.register_dim - 1).leading_zeros()) as usize;
    let (cut_losses, max_cut_loss, loss_budget) = if n <= DISJ_LOSS_MAX_N {
        let mut losses = Vec::with_capacity(plan.stage_count());
        for s in 0..plan.stage_count() {
            losses.push(fin(
                &format!("measurement cut {s} loss"),
                disjointness_transcript_loss(&plan, analysis.delta, Cut::Measure(s))?,
            )?);
        }
        let max = losses.iter().copied().fold(0.0_f64, f64::max);
        let budget = plan.stage_count() as f64 * ((n as f64).log2() + 2.0);
        (Some(losses), Some(max), Some(budget))
    } else {
        (None, None, None)
    };
    let sampled = match trials {
        None => None,
        Some((trials, seed)) => {
            let mut rng = rng_from_seed(seed);
            let size = 1usize << n;
            let mut max = 0.0_f64;
            let mut sum = 0.0;
            for _ in 0..trials {
                let x = rng.gen_range(0..size);
                let y = rng.gen_range(0..size);
                let e = analysis.error_probability(x, y);
                max = max.max(e);
                sum += e;
            }
            Some(SampledError {
                trials,
                seed,
                max_error_probability: fin("sampled max error", max)?,
                mean_error_probability: fin("sampled mean error", sum / trials as f64)?,
            })
        }
    };
    Ok(DisjReport {
        n,
        stage_iterations: plan.stage_iterations.clone(),
        total_iterations: plan.total_iterations(),
        register_dim: plan.register_dim,
        qubits_per_message,
        communication_qubits: 2 * plan.total_iterations() * qubits_per_message,
        delta: fin("delta", analysis.delta)?,
        max_error_probability: max_error,
        min_message_overlap: fin("min_message_overlap", analysis.min_message_overlap)?,
        error_by_overlap: analysis.error_by_overlap.clone(),
        measurement_cut_loss_bits: cut_losses,
        max_measurement_cut_loss_bits: max_cut_loss,
        loss_budget_bits: loss_budget,
        sampled,
    })
}

fn opt_cell<T: std::fmt::Display>(opt: &Option<T>) -> String {
    opt.as_ref().map_or_else(String::new, T::to_string)
}

fn disj_csv(report: &DisjReport) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("n".into(), report.n.to_string()),
        ("stage_iterations".into(), join(&report.stage_iterations)),
        ("total_iterations".into(), report.total_iterations.to_string()),
        ("register_dim".into(), report.register_dim.to_string()),
        ("qubits_per_message".into(), report.qubits_per_message.to_string()),
        ("communication_qubits".into(), report.communication_qubits.to_string()),
        ("delta".into(), report.delta.to_string()),
        ("max_error_probability".into(), report.max_error_probability.to_string()),
        ("min_message_overlap".into(), report.min_message_overlap.to_string()),
        ("error_by_overlap".into(), join(&report.error_by_overlap)),
    ];
    if let Some(losses) = &report.measurement_cut_loss_bits {
        rows.push(("measurement_cut_loss_bits".into(), join(losses)));
        rows.push((
            "max_measurement_cut_loss_bits".into(),
            opt_cell(&report.max_measurement_cut_loss_bits),
        ));
        rows.push(("loss_budget_bits".into(), opt_cell(&report.loss_budget_bits)));
    }
    if let Some(s) = &report.sampled {
        rows.push(("sampled_trials".into(), s.trials.to_string()));
        rows.push(("sampled_seed".into(), s.seed.to_string()));
        rows.push(("sampled_max_error_probability".into(), s.max_error_probability.to_string()));
        rows.push(("sampled_mean_error_probability".into(), s.mean_error_probability.to_string()));
    }
    kv_csv(&rows)
}

pub fn paper(args: &PaperArgs) -> Result<()> {
    match args.protocol.as_str() {
        "and" => {
            reject(&args.n, "--n", "and")?;
            reject(&args.stages, "--stages", "and")?;
            reject(&args.trials, "--trials", "exact evaluation")?;
            reject(&args.seed, "--seed", "exact evaluation")?;
            let delta = require(args.delta, "--delta", "and")?;
            let report = and_report(delta)?;
            let csv = kv_csv(&[
                ("delta".into(), report.delta.to_string()),
                ("rounds".into(), report.rounds.to_string()),
                ("success_probability".into(), report.success_probability.to_string()),
                ("error_probability".into(), report.error_probability.to_string()),
                ("abort_probability".into(), report.abort_probability.to_string()),
                ("bob_round_leakage".into(), report.bob_round_leakage.to_string()),
                ("al_round_leakage".into(), report.al_round_leakage.to_string()),
                ("qubits_sent".into(), report.qubits_sent.to_string()),
            ]);
            emit(&report, csv, &args.output)
        }
        "idmin-private" => {
            reject(&args.delta, "--delta", "idmin-private")?;
            reject(&args.stages, "--stages", "idmin-private")?;
            reject(&args.trials, "--trials", "exact evaluation")?;
            reject(&args.seed, "--seed", "exact evaluation")?;
            let n = require(args.n, "--n", "idmin-private")?;
            let report = idmin_private_report(n)?;
            let csv = kv_csv(&[
                ("n".into(), report.n.to_string()),
                ("error_uniform".into(), report.error_uniform.to_string()),
                ("max_privacy_loss_bits".into(), report.max_privacy_loss_bits.to_string()),
                ("rounds_worst_case".into(), report.rounds_worst_case.to_string()),
                (
                    "communication_bits_worst_case".into(),
                    report.communication_bits_worst_case.to_string(),
                ),
            ]);
            emit(&report, csv, &args.output)
        }
        "idmin-leaky" => {
            reject(&args.stages, "--stages", "idmin-leaky")?;
            reject(&args.trials, "--trials", "exact evaluation")?;
            reject(&args.seed, "--seed", "exact evaluation")?;
            let n = require(args.n, "--n", "idmin-leaky")?;
            let delta = require(args.delta, "--delta", "idmin-leaky")?;
            let report = idmin_leaky_report(n, delta)?;
            let csv = kv_csv(&[
                ("n".into(), report.n.to_string()),
                ("delta".into(), report.delta.to_string()),
                ("error_uniform".into(), report.error_uniform.to_string()),
                ("error_bound".into(), report.error_bound.to_string()),
                ("max_expected_leakage".into(), report.max_expected_leakage.to_string()),
                ("expected_leakage_bound".into(), report.expected_leakage_bound.to_string()),
                ("max_leakage".into(), report.max_leakage.to_string()),
                ("max_privacy_loss_bits".into(), report.max_privacy_loss_bits.to_string()),
                ("rounds_worst_case".into(), report.rounds_worst_case.to_string()),
                (
                    "communication_bits_worst_case".into(),
                    report.communication_bits_worst_case.to_string(),
                ),
                ("communication_bound_bits".into(), report.communication_bound_bits.to_string()),
            ]);
            emit(&report, csv, &args.output)
        }
        "disj" => {
            reject(&args.delta, "--delta", "disj")?;
            let n = require(args.n, "--n", "disj")?;
            let plan = match &args.stages {
                Some(s) => Some(input::stage_plan(n, s)?),
                None => None,
            };
            let trials = match (args.trials, args.seed) {
                (None, None) => None,
                (None, Some(_)) => {
                    return Err(Error::InvalidArgument("--seed needs --trials".into()))
                }
                (Some(_), None) => {
                    return Err(Error::InvalidArgument(
                        "--trials needs --seed: sampling must be reproducible".into(),
                    ))
                }
                (Some(t), Some(seed)) => {
                    if t == 0 {
                        return Err(Error::InvalidArgument("--trials must be positive".into()));
                    }
                    Some((t, seed))
                }
            };
            let report = disj_report(n, plan, trials)?;
            let csv = disj_csv(&report);
            emit(&report, csv, &args.output)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown construction `{other}`; expected and, idmin-private, idmin-leaky, disj"
        ))),
    }
}

#[derive(Serialize)]
struct SweepReport<R: Serialize> {
    protocol: String,
    rows: Vec<R>,
}

fn sweep_emit<R: Serialize>(
    protocol: &str,
    rows: Vec<R>,
    header: &str,
    line: impl Fn(&R) -> String,
    output: &OutputArgs,
) -> Result<()> {
    let mut csv = String::from(header);
    for row in &rows {
        csv.push_str(&line(row));
    }
    let report = SweepReport { protocol: protocol.to_string(), rows };
    emit(&report, csv, output)
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    match args.protocol.as_str() {
        "and" => {
            reject(&args.n, "--n", "and")?;
            reject(&args.stages, "--stages", "and sweeps")?;
            let deltas = input::parse_f64_list(require_list(&args.delta, "--delta", "and")?, "--delta")?;
            let rows = deltas.into_iter().map(and_report).collect::<Result<Vec<_>>>()?;
            sweep_emit("and", rows, AND_CSV_HEADER, and_csv_line, &args.output)
        }
        "idmin-private" => {
            reject(&args.delta, "--delta", "idmin-private")?;
            reject(&args.stages, "--stages", "idmin-private")?;
            let ns = input::parse_usize_list(require_list(&args.n, "--n", "idmin-private")?, "--n")?;
            let rows = ns.into_iter().map(idmin_private_report).collect::<Result<Vec<_>>>()?;
            sweep_emit(
                "idmin-private",
                rows,
                IDMIN_PRIVATE_CSV_HEADER,
                idmin_private_csv_line,
                &args.output,
            )
        }
        "idmin-leaky" => {
            reject(&args.stages, "--stages", "idmin-leaky")?;
            let ns = input::parse_usize_list(require_list(&args.n, "--n", "idmin-leaky")?, "--n")?;
            let deltas =
                input::parse_f64_list(require_list(&args.delta, "--delta", "idmin-leaky")?, "--delta")?;
            let mut rows = Vec::with_capacity(ns.len() * deltas.len());
            for &n in &ns {
                for &delta in &deltas {
                    rows.push(idmin_leaky_report(n, delta)?);
                }
            }
            sweep_emit("idmin-leaky", rows, IDMIN_LEAKY_CSV_HEADER, idmin_leaky_csv_line, &args.output)
        }
        "disj" => {
            reject(&args.delta, "--delta", "disj")?;
            let ns = input::parse_usize_list(require_list(&args.n, "--n", "disj")?, "--n")?;
            let rows = match &args.stages {
                Some(stages) => {
                    if ns.len() != 1 {
                        return Err(Error::InvalidArgument(
                            "--stages sweeps need a single --n".into(),
                        ));
                    }
                    stages
                        .split(';')
                        .map(|plan| disj_report(ns[0], Some(input::stage_plan(ns[0], plan)?), None))
                        .collect::<Result<Vec<_>>>()?
                }
                None => ns
                    .into_iter()
                    .map(|n| disj_report(n, None, None))
                    .collect::<Result<Vec<_>>>()?,
            };
            let header = "n,stage_iterations,total_iterations,register_dim,delta,\
                          max_error_probability,min_message_overlap,\
                          max_measurement_cut_loss_bits,loss_budget_bits\n";
            let line = |r: &DisjReport| {
                format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.n,
                    join(&r.stage_iterations),
                    r.total_iterations,
                    r.register_dim,
                    r.delta,
                    r.max_error_probability,
                    r.min_message_overlap,
                    opt_cell(&r.max_measurement_cut_loss_bits),
                    opt_cell(&r.loss_budget_bits)
                )
            };
            sweep_emit("disj", rows, header, line, &args.output)
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown construction `{other}`; expected and, idmin-private, idmin-leaky, disj"
        ))),
    }
}
