use std::fmt::Write as _;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reticulate_core::analysis::{ball_mass_profile, monotonicity_check};
use reticulate_core::{
    adapt, balance_report, classify, components, effective_tensor, homogenize_window,
    largest_principal_angle, mass_tensor, maximality_check, planarize, realize_as_mixture, AdaptOptions,
    Anisotropy, Error, FluctuationModel, LatticeKind, Medium, Point, SinkMode, SymMatrix64, Tolerances,
};

use crate::{CliError, Outcome, EXIT_MISMATCH};

/// Principal angle below which the numerical and predicted kernels agree.
pub const ANGLE_TOL: f64 = 1e-6;

fn fmt_num(x: f64) -> String {
    format!("{x:.12e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_int_vec(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn write_matrix(out: &mut String, name: &str, m: &SymMatrix64) {
    let _ = writeln!(out, "{name}:");
    for row in m.to_rows() {
        let _ = writeln!(out, "  {}", fmt_vec(&row));
    }
}

fn mode_name(mode: Anisotropy) -> &'static str {
    match mode {
        Anisotropy::Isotropic => "isotropic",
        Anisotropy::Tangential => "tangential",
    }
}

pub fn kind_label(kind: &LatticeKind, reticulate: bool) -> String {
    match kind {
        LatticeKind::Trivial => "Trivial".into(),
        LatticeKind::QuasiLaminate { direction } => format!("QuasiLaminate dir {}", fmt_int_vec(direction)),
        LatticeKind::Loopy if reticulate => "Loopy / reticulate".into(),
        LatticeKind::Loopy => "Loopy".into(),
        LatticeKind::Intermediate { rank } => format!("Intermediate rank {rank}"),
    }
}

pub fn analyze(medium: &Medium, tol_rank: f64, planarized: bool) -> Result<Outcome, CliError> {
    let mut out = String::new();
    let tol = Tolerances::<f64>::standard();
    let raw = &medium.network;
    let _ = writeln!(
        out,
        "medium: dimension {}, {} nodes, {} edges, {}",
        raw.dimension(),
        raw.node_count(),
        raw.edge_count(),
        mode_name(medium.mode)
    );
    let medium = if planarized && raw.dimension() == 2 {
        let net = planarize(raw, tol.geom)?;
        let _ = writeln!(out, "planarized: {} nodes, {} edges", net.node_count(), net.edge_count());
        Medium::new(net, medium.mode)
    } else {
        medium.clone()
    };
    let eff = effective_tensor(&medium)?;
    let q = &eff.q;
    write_matrix(&mut out, "mass tensor", &mass_tensor(&medium));
    write_matrix(&mut out, "Q", q);
    let _ = writeln!(out, "eigenvalues: {}", fmt_vec(&q.eigenvalues()));
    let kernel = eff.kernel(tol_rank);
    if kernel.is_empty() {
        let _ = writeln!(out, "kernel: none");
    } else {
        let _ = writeln!(out, "kernel:");
        for v in &kernel {
            let _ = writeln!(out, "  {}", fmt_vec(v));
        }
    }
    let class = classify(&medium.network);
    let _ = writeln!(out, "cycle lattice:");
    if class.per_component.is_empty() {
        let _ = writeln!(out, "  (no components)");
    }
    for (c, l) in &class.per_component {
        let basis: Vec<String> = l.basis.iter().map(|b| fmt_int_vec(b)).collect();
        let _ = writeln!(out, "  component {c}: rank {}, basis {}", l.rank, basis.join(" "));
    }
    let label = kind_label(&class.kind, class.reticulate);
    let angle = largest_principal_angle(&kernel, &class.predicted_kernel);
    let matched = angle <= ANGLE_TOL;
    let q_note = if q.max_abs() == 0.0 { "; Q=0" } else { "" };
    let _ = writeln!(out, "classification: {label}{q_note}");
    let _ = writeln!(
        out,
        "kernel match: {} (angle={})",
        if matched { "yes" } else { "no" },
        if angle == 0.0 { "0".to_string() } else { format!("{angle:.3e}") }
    );
    Ok(Outcome::new(out, matched))
}

pub fn stationarity(medium: &Medium) -> Result<Outcome, CliError> {
    let mut out = String::new();
    let balance = balance_report(medium);
    let max = maximality_check(medium)?;
    if balance.balanced {
        let _ = writeln!(out, "balance: balanced (max residual {})", fmt_num(balance.max_residual));
    } else {
        let _ = writeln!(out, "balance: unbalanced (res {})", fmt_num(balance.max_residual));
        for b in balance.per_node.iter().filter(|b| b.norm > 0.0) {
            let _ = writeln!(out, "  node {}: residual {}", b.node, fmt_vec(&b.residual));
        }
    }
    write_matrix(&mut out, "gap (mass - Q)", &max.gap);
    let _ = writeln!(
        out,
        "maximality: {} (gap {})",
        if max.is_maximal { "maximal" } else { "NOT maximal" },
        fmt_num(max.gap_norm)
    );
    if balance.isotropic_note {
        let _ = writeln!(
            out,
            "note: isotropic medium; the residual is the tangential part and the mass tensor carries an isotropic excess"
        );
        let _ = writeln!(out, "verdict: equivalence applies to tangential media only");
        return Ok(Outcome::new(out, true));
    }
    let agree = balance.balanced == max.is_maximal;
    let _ = writeln!(out, "verdict: {}", if agree { "verdicts agree" } else { "verdicts DISAGREE" });
    Ok(Outcome::new(out, agree))
}

pub fn homogenize(medium: &Medium, radii: &[usize]) -> Result<Outcome, CliError> {
    let q = effective_tensor(medium)?.q;
    let trace = homogenize_window(medium, radii)?;
    let n = medium.dimension();
    let mut out = String::from("R");
    for i in 0..n {
        for j in i..n {
            let _ = write!(out, ",q{}{}", i + 1, j + 1);
        }
    }
    out.push_str(",error_F\n");
    for w in &trace.windows {
        let _ = write!(out, "{}", w.r);
        for x in w.q.upper() {
            let _ = write!(out, ",{}", fmt_num(*x));
        }
        let _ = writeln!(out, ",{}", fmt_num((&w.q - &q).frobenius_norm()));
    }
    Ok(Outcome::new(out, true))
}

/// `count` points on the support, edges chosen proportionally to length.
pub fn sample_centers(medium: &Medium, count: usize, seed: u64) -> Result<Vec<Point>, CliError> {
    let net = &medium.network;
    let tol = Tolerances::<f64>::standard();
    let edges = net.support_edges(&tol);
    if edges.is_empty() {
        return Err(CliError::Usage("cannot sample centers on an empty support".into()));
    }
    let lengths: Vec<f64> = edges.iter().map(|&e| net.length(e)).collect();
    let pick = WeightedIndex::new(&lengths).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let e = edges[pick.sample(&mut rng)];
            let t: f64 = rng.gen();
            let xu = net.nodes()[net.edges()[e].u].coords();
            let d = net.displacement(e);
            Point::new(xu.iter().zip(&d).map(|(x, y)| x + t * y).collect())
        })
        .collect())
}

pub fn monotonicity_radii() -> Vec<f64> {
    (1..=50).map(|i| 0.4 * f64::from(i) / 50.0).collect()
}

/// Returns the report and the CSV of all profiles.
pub fn monotonicity(medium: &Medium, alpha: f64, centers: usize, seed: u64) -> Result<(Outcome, String), CliError> {
    let points = sample_centers(medium, centers, seed)?;
    let radii = monotonicity_radii();
    let report = monotonicity_check(medium, &points, &radii, alpha)?;
    let mut out = String::new();
    let _ = writeln!(out, "centers: {centers} (seed {seed}), radii: 50 in (0, 0.4], alpha {alpha}");
    let _ = writeln!(out, "worst violation: {}", fmt_num(report.worst_violation));
    let _ = writeln!(out, "monotonicity: {}", if report.pass { "pass" } else { "FAIL" });
    let n = medium.dimension();
    let mut csv = String::from("center");
    for i in 0..n {
        let _ = write!(csv, ",x{}", i + 1);
    }
    csv.push_str(",r,mass,ratio\n");
    for (c, p) in points.iter().enumerate() {
        let profile = ball_mass_profile(medium, p, &radii)?;
        for (r, m) in profile.radii.iter().zip(&profile.masses) {
            let _ = write!(csv, "{c}");
            for x in p.coords() {
                let _ = write!(csv, ",{}", fmt_num(*x));
            }
            let _ = writeln!(csv, ",{},{},{}", fmt_num(*r), fmt_num(*m), fmt_num(m / r.powf(alpha)));
        }
    }
    Ok((Outcome::new(out, report.pass), csv))
}

pub fn parse_mode(text: &str) -> Result<SinkMode, CliError> {
    if text == "random" {
        return Ok(SinkMode::Random);
    }
    text.strip_prefix("fixed:")
        .and_then(|n| n.parse().ok())
        .map(SinkMode::Fixed)
        .ok_or_else(|| CliError::Usage(format!("--mode must be random or fixed:NODE, got {text:?}")))
}

/// Returns the summary and the trace CSV.
pub fn adaptation(
    medium: &Medium,
    model: &FluctuationModel<f64>,
    opts: &AdaptOptions,
) -> Result<(Outcome, String), CliError> {
    let trace = adapt(medium, model, opts)?;
    let mut csv = String::from("step,lambda_min,lambda_max,ratio,dissipation,total_mass\n");
    for s in &trace.steps {
        let ev = s.q.eigenvalues();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.t,
            fmt_num(ev[0]),
            fmt_num(ev[ev.len() - 1]),
            fmt_num(s.lambda_min_ratio),
            fmt_num(s.dissipation),
            fmt_num(s.total_mass)
        );
    }
    let mut out = String::new();
    let last = trace.last().expect("trace records the initial state");
    let _ = writeln!(out, "steps: {}, recorded: {}", opts.steps, trace.steps.len());
    if !trace.underflows.is_empty() {
        let _ = writeln!(out, "weight underflows: {}", trace.underflows.len());
    }
    let _ = writeln!(out, "final lambda_min ratio: {}", fmt_num(last.lambda_min_ratio));
    Ok((Outcome::new(out, true), csv))
}

pub fn parse_matrix(text: &str) -> Result<SymMatrix64, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("--matrix: {e}")))?;
    let m = values.len();
    // m = n (n + 1) / 2
    let n = (((8 * m + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
    SymMatrix64::from_upper(n, values)
        .filter(|_| n * (n + 1) / 2 == m && n > 0)
        .ok_or_else(|| CliError::Usage(format!("--matrix: {m} entries is not an upper triangle")))
}

pub fn realize(a: &SymMatrix64, k: usize) -> Result<Outcome, CliError> {
    match realize_as_mixture(a, k) {
        Ok(mix) => {
            let mut out = String::new();
            let _ = writeln!(out, "A = sum of weight * P / {k} over {} rank-{k} projections P", mix.atoms.len());
            for (i, atom) in mix.atoms.iter().enumerate() {
                let _ = writeln!(out, "atom {i}: weight {}", fmt_num(atom.lambda));
                for v in &atom.basis {
                    let _ = writeln!(out, "  {}", fmt_vec(v));
                }
            }
            let err = (&mix.reconstruct() - a).frobenius_norm();
            let _ = writeln!(out, "reconstruction error: {}", fmt_num(err));
            Ok(Outcome::new(out, true))
        }
        Err(Error::NotRealizable { k, lambda_max }) => Ok(Outcome {
            stdout: format!(
                "NotRealizable: largest eigenvalue {} exceeds 1/{k}\n",
                fmt_num(lambda_max)
            ),
            code: EXIT_MISMATCH,
        }),
        Err(e) => Err(e.into()),
    }
}

pub fn decompose(medium: &Medium) -> Result<Outcome, CliError> {
    let total = effective_tensor(medium)?.q;
    let parts = components(&medium.network);
    let mut out = String::new();
    let _ = writeln!(out, "components: {}", parts.len());
    let mut sum = SymMatrix64::zeros(medium.dimension());
    for (i, net) in parts.into_iter().enumerate() {
        let _ = writeln!(out, "component {i}: {} nodes, {} edges", net.node_count(), net.edge_count());
        let q = effective_tensor(&Medium::new(net, medium.mode))?.q;
        write_matrix(&mut out, &format!("Q[{i}]"), &q);
        sum = &sum + &q;
    }
    write_matrix(&mut out, "Q", &total);
    let diff = (&sum - &total).frobenius_norm();
    let ok = diff <= 1e-10 * (1.0 + total.frobenius_norm());
    let _ = writeln!(
        out,
        "sum of components {} total (difference {})",
        if ok { "matches" } else { "DOES NOT match" },
        fmt_num(diff)
    );
    Ok(Outcome::new(out, ok))
}
