use std::fs;
use std::path::Path;

use ntangle_core::cost::{
    count_fast_path, count_naive_path, count_naive_path_with, reference_fast_count, reference_naive_count, timing_sweep,
};
use ntangle_core::io::{parse_density, parse_state, write_state};
use ntangle_core::naive::{
    even_form_tangle_naive, find_noninvariance_witness_with, tangle_i_naive_with, DEFAULT_ORACLE_CAP, MAX_ORACLE_CAP,
};
use ntangle_core::residual::{residual_parts_defining, residual_parts_reduced, residual_tau_i};
use ntangle_core::roof::{convex_roof_tangle, MixedState, RoofOptions};
use ntangle_core::slocc::{
    random_local_invertible, random_local_unitary, verify_lu_invariance, verify_slocc_measure, TangleMeasure,
    DEFAULT_CONDITION_CAP,
};
use ntangle_core::stategen::{basis_product, ghz, parse_bitstring, random_pure, w};
use ntangle_core::three::ckw_terms;
use ntangle_core::{
    compute_tpq, n_tangle, permute_qubits, tangle_1_fast, tangle_i_fast, OracleOptions, PureState, QubitPermutation,
    SumMode, Tpq,
};

use crate::report::{Record, Report};
use crate::{
    BenchArgs, CliError, GenArgs, GenKind, OracleArgs, PermArgs, ResidualArgs, RoofArgs, SloccArgs, StateArgs,
    Tangle3Args, VerifyArgs,
};

/// Largest n for the exhaustive permutation check.
const PERM_CHECK_MAX_N: usize = 7;
/// Largest n accepted by `gen` and `bench`.
const MAX_GENERATED_QUBITS: usize = 24;
const RECONSTRUCTION_TOL: f64 = 1e-8;

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<PureState, CliError> {
    parse_state(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_density(path: &Path) -> Result<MixedState, CliError> {
    parse_density(&read_file(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn require_odd(n: usize) -> Result<(), CliError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(CliError::Input(format!("n must be odd and at least 3, got {n}")));
    }
    Ok(())
}

fn qubits(n: usize, only: Option<usize>) -> Result<Vec<usize>, CliError> {
    match only {
        Some(i) if i == 0 || i > n => Err(CliError::Input(format!("qubit {i} is out of range 1..={n}"))),
        Some(i) => Ok(vec![i]),
        None => Ok((1..=n).collect()),
    }
}

/// Independent seed for the `k`-th draw of a run started from `seed`.
fn sub_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn with_complex(r: Record, name: &str, z: ntangle_core::Amplitude) -> Record {
    r.with(&format!("{name}_re"), z.re).with(&format!("{name}_im"), z.im)
}

fn with_tpq(r: Record, tpq: &Tpq) -> Record {
    let r = with_complex(r, "T", tpq.t);
    let r = with_complex(r, "P", tpq.p);
    with_complex(r, "Q", tpq.q)
}

fn permutation_text(p: &QubitPermutation) -> String {
    p.as_slice().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn transposed(s: &PureState, i: usize) -> Result<PureState, CliError> {
    Ok(permute_qubits(s, &QubitPermutation::transposition(s.n(), 1, i)?)?)
}

pub(crate) fn compute(a: &StateArgs) -> Result<Report, CliError> {
    let s = read_state(&a.state)?;
    let rep = n_tangle(&s)?;
    let mut report = Report::new("compute");
    for i in qubits(s.n(), a.qubit)? {
        let r = Record::new("qubit")
            .with("n", s.n())
            .with("i", i)
            .with("tau_i", rep.per_qubit[i - 1])
            .with("tau_avg", rep.average);
        report.push(with_tpq(r, &rep.tpq_per_qubit[i - 1]));
    }
    Ok(report)
}

pub(crate) fn oracle(a: &OracleArgs) -> Result<Report, CliError> {
    if a.cap > MAX_ORACLE_CAP {
        return Err(CliError::Input(format!("--cap is at most {MAX_ORACLE_CAP}")));
    }
    let s = read_state(&a.state)?;
    let n = s.n();
    let opts = OracleOptions { cap: a.cap, mode: if a.full_sum { SumMode::Full } else { SumMode::Pruned } };
    let mut report = Report::new("oracle");
    for i in qubits(n, a.qubit)? {
        let naive = tangle_i_naive_with(&s, i, &opts)?;
        let fast = tangle_i_fast(&s, i)?;
        let counts = count_naive_path_with(&s, i, &opts)?;
        let scaled_diff = (fast - naive).abs() / naive.max(1.0);
        report.passed &= scaled_diff <= a.tol;
        let mut r = Record::new("qubit")
            .with("n", n)
            .with("i", i)
            .with("mode", if a.full_sum { "full" } else { "pruned" })
            .with("tau_naive", naive)
            .with("tau_fast", fast)
            .with("scaled_diff", scaled_diff)
            .with("mults_pruned", counts.pruned);
        if let Some(literal) = counts.literal {
            r = r.with("mults_literal", literal);
        }
        report.push(r.with("paper_count", reference_naive_count(n)));
    }
    if a.even_form {
        let value = even_form_tangle_naive(&s, &opts, a.force)?;
        let mut r = Record::new("even_form").with("n", n).with("value", value);
        if n == 3 {
            let diff = (value - tangle_1_fast(&s)?).abs();
            report.passed &= diff <= a.tol;
            r = r.with("diff_to_fast", diff);
        }
        report.push(r);
    }
    Ok(report)
}

pub(crate) fn tangle3(a: &Tangle3Args) -> Result<Report, CliError> {
    let s = read_state(&a.state)?;
    let terms = ckw_terms(&s)?;
    let opts = OracleOptions::default();
    let mut terms_rec = Record::new("terms");
    for (name, z) in [("d1", terms.d1), ("d2", terms.d2), ("d3", terms.d3)] {
        terms_rec = with_complex(terms_rec, name, z);
    }

    let mut values = vec![
        ("coefficient_form", terms.tangle()),
        ("even_form_oracle", even_form_tangle_naive(&s, &opts, false)?),
        ("fast_tau_1", tangle_1_fast(&s)?),
    ];
    for (i, name) in [(1, "oracle_tau_1"), (2, "oracle_tau_2"), (3, "oracle_tau_3")] {
        values.push((name, tangle_i_naive_with(&s, i, &opts)?));
    }
    values.push(("average", n_tangle(&s)?.average));
    let max_diff = values.iter().flat_map(|(_, x)| values.iter().map(move |(_, y)| (x - y).abs())).fold(0.0, f64::max);

    let mut formulas = Record::new("formulas");
    for (name, v) in values {
        formulas = formulas.with(name, v);
    }
    let mut report = Report::new("tangle3");
    report.passed = max_diff <= a.tol;
    report.push(terms_rec);
    report.push(formulas.with("max_pairwise_diff", max_diff).with("tol", a.tol));
    Ok(report)
}

pub(crate) fn residual(a: &ResidualArgs) -> Result<Report, CliError> {
    let s = read_state(&a.state)?;
    let i = qubits(s.n(), Some(a.qubit))?[0];
    let t = transposed(&s, i)?;
    let parts = residual_parts_defining(&t)?;
    let forms_diff = parts.max_diff(&residual_parts_reduced(&t)?);
    let tpq = compute_tpq(&t)?;
    let bridge_error = (parts.i_bar - tpq.t)
        .norm()
        .max((parts.i_star - tpq.p / 2.0).norm())
        .max((parts.i_star_shift - tpq.q / 2.0).norm());
    let tau = residual_tau_i(&s, i)?;
    let fast = tangle_i_fast(&s, i)?;
    let rel_diff = if fast == 0.0 { tau.abs() } else { (tau - fast).abs() / fast };

    let r = Record::new("residual").with("n", s.n()).with("i", i);
    let r = with_complex(r, "I_bar", parts.i_bar);
    let r = with_complex(r, "I_star", parts.i_star);
    let r = with_complex(r, "I_star_shift", parts.i_star_shift);
    let r = with_tpq(r, &tpq)
        .with("bridge_error", bridge_error)
        .with("forms_diff", forms_diff)
        .with("residual_tau", tau)
        .with("fast_tau", fast)
        .with("rel_diff", rel_diff)
        .with("tol", a.tol);
    let mut report = Report::new("residual");
    report.passed = bridge_error <= a.tol && forms_diff <= a.tol && rel_diff <= a.tol;
    report.push(r);
    Ok(report)
}

pub(crate) fn slocc_check(a: &SloccArgs) -> Result<Report, CliError> {
    require_odd(a.n)?;
    let mut report = Report::new("slocc-check");
    let mut worst: f64 = 0.0;
    let mut checks = 0usize;
    for trial in 0..a.trials {
        let s = random_pure(a.n, sub_seed(a.seed, 2 * trial));
        let verdicts = if a.unitary {
            let u = random_local_unitary(a.n, sub_seed(a.seed, 2 * trial + 1));
            let lu = verify_lu_invariance(&s, &u, a.tol)?;
            let mut v = vec![("residual".to_string(), lu.residual)];
            v.extend(lu.per_qubit.iter().enumerate().map(|(k, x)| (format!("tau_{}", k + 1), *x)));
            v.push(("average".to_string(), lu.average));
            v
        } else {
            let chain = random_local_invertible(a.n, sub_seed(a.seed, 2 * trial + 1), a.cap)?;
            let mut measures = vec![TangleMeasure::Residual];
            measures.extend((1..=a.n).map(TangleMeasure::Qubit));
            measures.push(TangleMeasure::Average);
            measures
                .into_iter()
                .map(|m| Ok((m.label(), verify_slocc_measure(&s, &chain, m, a.tol, false)?)))
                .collect::<Result<Vec<_>, CliError>>()?
        };
        for (measure, v) in verdicts {
            worst = worst.max(v.rel_error);
            checks += 1;
            report.passed &= v.passed;
            report.push(
                Record::new("check")
                    .with("trial", trial)
                    .with("measure", measure)
                    .with("lhs", v.lhs)
                    .with("rhs", v.rhs)
                    .with("rel_error", v.rel_error)
                    .with("passed", v.passed),
            );
        }
    }
    report.push(
        Record::new("summary")
            .with("n", a.n)
            .with("mode", if a.unitary { "unitary" } else { "invertible" })
            .with("pairs", a.trials)
            .with("checks", checks)
            .with("worst_rel_error", worst)
            .with("tol", a.tol)
            .with("passed", report.passed),
    );
    Ok(report)
}

fn perm_worst(s: &PureState, perms: &[QubitPermutation]) -> Result<(f64, f64), CliError> {
    let base = n_tangle(s)?;
    let (mut avg, mut cov): (f64, f64) = (0.0, 0.0);
    for p in perms {
        let moved = n_tangle(&permute_qubits(s, p)?)?;
        avg = avg.max((moved.average - base.average).abs());
        for i in 1..=s.n() {
            cov = cov.max((moved.per_qubit[p.apply(i) - 1] - base.per_qubit[i - 1]).abs());
        }
    }
    Ok((avg, cov))
}

pub(crate) fn perm_check(a: &PermArgs) -> Result<Report, CliError> {
    if a.witness {
        return witness(a);
    }
    let states: Vec<(String, PureState)> = match &a.state {
        Some(path) => vec![(path.display().to_string(), read_state(path)?)],
        None => {
            require_odd(a.n)?;
            (0..a.trials).map(|k| (format!("random {k}"), random_pure(a.n, sub_seed(a.seed, k)))).collect()
        }
    };
    let mut report = Report::new("perm-check");
    for (label, s) in states {
        if s.n() > PERM_CHECK_MAX_N {
            return Err(CliError::Input(format!("exhaustive permutation check supports n <= {PERM_CHECK_MAX_N}")));
        }
        let perms = QubitPermutation::all(s.n());
        let (avg, cov) = perm_worst(&s, &perms)?;
        let passed = avg <= a.tol && cov <= a.tol;
        report.passed &= passed;
        report.push(
            Record::new("state")
                .with("state", label)
                .with("n", s.n())
                .with("permutations", perms.len())
                .with("worst_average_diff", avg)
                .with("worst_per_qubit_diff", cov)
                .with("tol", a.tol)
                .with("passed", passed),
        );
    }
    Ok(report)
}

fn witness(a: &PermArgs) -> Result<Report, CliError> {
    if a.n < 5 || a.n.is_multiple_of(2) || a.n > MAX_ORACLE_CAP {
        return Err(CliError::Input(format!("witness search needs odd n in 5..={MAX_ORACLE_CAP}, got {}", a.n)));
    }
    let opts = OracleOptions { cap: MAX_ORACLE_CAP, ..Default::default() };
    let r = Record::new("witness").with("n", a.n).with("trials", a.trials).with("seed", a.seed);
    let r = match find_noninvariance_witness_with(a.n, a.trials, a.seed, &opts)? {
        Some(found) => r
            .with("verdict", "confirmed")
            .with("trial", found.trial)
            .with("permutation", permutation_text(&found.permutation))
            .with("before", found.before)
            .with("after", found.after)
            .with("delta", found.delta()),
        None => r.with("verdict", "unconfirmed"),
    };
    let mut report = Report::new("perm-check");
    report.push(r);
    Ok(report)
}

pub(crate) fn roof(a: &RoofArgs) -> Result<Report, CliError> {
    let rho = read_density(&a.density)?;
    if a.force && rho.n() > 3 {
        eprintln!("warning: convex-roof search at n = {} may take a long time", rho.n());
    }
    let opts = RoofOptions {
        m_max: a.m_max,
        restarts: a.restarts,
        seed: a.seed,
        tol: a.tol,
        allow_large_n: a.force,
        ..Default::default()
    };
    let result = convex_roof_tangle(&rho, &opts)?;
    let reconstruction_error = result.best.reconstruction_error(&rho);
    let best_start = result.start_values.iter().copied().fold(f64::INFINITY, f64::min);

    let mut report = Report::new("roof");
    report.passed = reconstruction_error <= RECONSTRUCTION_TOL;
    report.push(
        Record::new("roof")
            .with("n", rho.n())
            .with("rank", rho.rank())
            .with("members", result.best.members.len())
            .with("value", result.value)
            .with("restarts_used", result.restarts_used)
            .with("converged", result.converged)
            .with("eigen_start", result.start_values[0])
            .with("best_start", best_start)
            .with("reconstruction_error", reconstruction_error),
    );
    for (k, m) in result.best.members.iter().enumerate() {
        report.push(
            Record::new("member")
                .with("member", k)
                .with("weight", m.weight)
                .with("tangle", n_tangle(&m.state)?.average),
        );
    }
    for (k, m) in result.best.members.iter().enumerate() {
        for (index, z) in m.state.amplitudes().iter().enumerate() {
            report.push(
                Record::new("amplitude").with("member", k).with("index", index).with("re", z.re).with("im", z.im),
            );
        }
    }
    Ok(report)
}

pub(crate) fn gen(a: &GenArgs) -> Result<String, CliError> {
    if a.kind != GenKind::Basis && (a.n == 0 || a.n > MAX_GENERATED_QUBITS) {
        return Err(CliError::Input(format!("n must be in 1..={MAX_GENERATED_QUBITS}")));
    }
    let s = match a.kind {
        GenKind::Ghz => ghz(a.n)?,
        GenKind::W => w(a.n)?,
        GenKind::Random => random_pure(a.n, a.seed),
        GenKind::Basis => {
            let bits = a.bits.as_deref().ok_or_else(|| CliError::Input("basis needs --bits".to_string()))?;
            basis_product(&parse_bitstring(bits)?)?
        }
    };
    Ok(write_state(&s))
}

pub(crate) fn bench(a: &BenchArgs) -> Result<Report, CliError> {
    for &n in &a.n {
        require_odd(n)?;
        if n > MAX_GENERATED_QUBITS {
            return Err(CliError::Input(format!("n must be at most {MAX_GENERATED_QUBITS}")));
        }
    }
    let mut report = Report::new("bench");
    if a.counts_only {
        for &n in &a.n {
            let s = random_pure(n, a.seed);
            let fast = count_fast_path(&s)?;
            report.push(
                Record::new("count")
                    .with("n", n)
                    .with("method", "fast")
                    .with("mult_count", fast.amplitude_mults)
                    .with("paper_count", reference_fast_count(n)),
            );
            if n <= DEFAULT_ORACLE_CAP {
                report.push(
                    Record::new("count")
                        .with("n", n)
                        .with("method", "naive_pruned")
                        .with("mult_count", count_naive_path(&s, 1)?.pruned)
                        .with("paper_count", reference_naive_count(n)),
                );
            }
        }
        return Ok(report);
    }
    for row in timing_sweep(&a.n, a.reps, a.seed)? {
        report.push(
            Record::new("timing")
                .with("n", row.n)
                .with("method", row.method.name())
                .with("mult_count", row.mult_count)
                .with("paper_count", row.paper_count)
                .with("median_seconds", row.median_seconds),
        );
    }
    Ok(report)
}

struct Property {
    name: &'static str,
    cases: usize,
    worst: f64,
}

impl Property {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, worst: 0.0 }
    }

    fn add(&mut self, error: f64) {
        self.cases += 1;
        // NaN must fail the check
        self.worst = if error.is_nan() { f64::NAN } else { self.worst.max(error) };
    }

    fn record(&self, tol: f64, report: &mut Report) {
        let passed = self.cases > 0 && self.worst <= tol;
        report.passed &= passed;
        report.push(
            Record::new("property")
                .with("property", self.name)
                .with("cases", self.cases)
                .with("worst_error", self.worst)
                .with("tol", tol)
                .with("passed", passed),
        );
    }
}

fn scaled_oracle_error(s: &PureState, i: usize) -> Result<f64, CliError> {
    let naive = tangle_i_naive_with(s, i, &OracleOptions::default())?;
    Ok((tangle_i_fast(s, i)? - naive).abs() / naive.max(1.0))
}

fn bridge_errors(s: &PureState) -> Result<(f64, f64), CliError> {
    let parts = residual_parts_defining(s)?;
    let tpq = compute_tpq(s)?;
    let bridge = (parts.i_bar - tpq.t)
        .norm()
        .max((parts.i_star - tpq.p / 2.0).norm())
        .max((parts.i_star_shift - tpq.q / 2.0).norm())
        .max(parts.max_diff(&residual_parts_reduced(s)?));
    let fast = tangle_1_fast(s)?;
    let tau = parts.tau();
    let rel = if fast == 0.0 { tau.abs() } else { (tau - fast).abs() / fast };
    Ok((bridge, rel))
}

pub(crate) fn verify_all(a: &VerifyArgs) -> Result<Report, CliError> {
    let user_state = a.state.as_deref().map(read_state).transpose()?;
    let tol = |default: f64| a.tol.unwrap_or(default);
    let state = |n: usize, k: usize| random_pure(n, sub_seed(a.seed, (n << 20) | k));
    let mut report = Report::new("verify-all");

    let mut ghz_anchor = Property::new("ghz_anchor");
    let mut w_anchor = Property::new("w_anchor");
    for n in [3, 5, 7, 9] {
        ghz_anchor.add((n_tangle(&ghz(n)?)?.average - 1.0).abs());
        w_anchor.add(n_tangle(&w(n)?)?.average.abs());
    }
    ghz_anchor.record(tol(1e-12), &mut report);
    w_anchor.record(tol(1e-12), &mut report);

    let mut bound = Property::new("unit_interval_bound");
    let mut oracle = Property::new("oracle_equivalence");
    let mut bridges = Property::new("bridge_identities");
    let mut residual = Property::new("residual_matches_fast");
    for n in [3, 5, 7, 9] {
        for k in 0..a.trials {
            let s = state(n, k);
            for tau in n_tangle(&s)?.per_qubit {
                bound.add((tau - 1.0).max(-tau).max(0.0));
            }
            if n <= DEFAULT_ORACLE_CAP {
                for i in 1..=n {
                    oracle.add(scaled_oracle_error(&s, i)?);
                }
            }
            let (b, r) = bridge_errors(&s)?;
            bridges.add(b);
            residual.add(r);
        }
    }
    bound.record(tol(1e-12), &mut report);
    oracle.record(tol(1e-10), &mut report);
    bridges.record(tol(1e-12), &mut report);
    residual.record(tol(1e-11), &mut report);

    let mut perm = Property::new("permutation_invariance");
    for n in [3, 5] {
        let perms = QubitPermutation::all(n);
        for k in 0..a.trials {
            let (avg, cov) = perm_worst(&state(n, 1000 + k), &perms)?;
            perm.add(avg.max(cov));
        }
    }
    perm.record(tol(1e-10), &mut report);

    let mut slocc = Property::new("slocc_equation");
    let mut lu = Property::new("lu_invariance");
    for n in [3, 5, 7] {
        let mut measures = vec![TangleMeasure::Residual, TangleMeasure::Average];
        measures.extend((1..=n).map(TangleMeasure::Qubit));
        for k in 0..a.trials {
            let s = state(n, 2000 + k);
            let chain = random_local_invertible(n, sub_seed(a.seed, (n << 20) | (3000 + k)), DEFAULT_CONDITION_CAP)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            for m in &measures {
                slocc.add(verify_slocc_measure(&s, &chain, *m, 0.0, false)?.rel_error);
            }
            let u = random_local_unitary(n, sub_seed(a.seed, (n << 20) | (4000 + k)));
            lu.add(verify_lu_invariance(&s, &u, 0.0)?.worst_error());
        }
    }
    slocc.record(tol(1e-9), &mut report);
    lu.record(tol(1e-9), &mut report);

    if let Some(s) = user_state {
        require_odd(s.n())?;
        if s.n() <= DEFAULT_ORACLE_CAP {
            let mut p = Property::new("state_oracle_equivalence");
            for i in 1..=s.n() {
                p.add(scaled_oracle_error(&s, i)?);
            }
            p.record(tol(1e-10), &mut report);
        }
        let (b, r) = bridge_errors(&s)?;
        let mut p = Property::new("state_bridge_identities");
        p.add(b);
        p.record(tol(1e-12), &mut report);
        let mut p = Property::new("state_residual_matches_fast");
        p.add(r);
        p.record(tol(1e-11), &mut report);
        if s.n() <= PERM_CHECK_MAX_N {
            let (avg, cov) = perm_worst(&s, &QubitPermutation::all(s.n()))?;
            let mut p = Property::new("state_permutation_invariance");
            p.add(avg.max(cov));
            p.record(tol(1e-10), &mut report);
        }
        let mut p = Property::new("state_lu_invariance");
        for k in 0..a.trials {
            let u = random_local_unitary(s.n(), sub_seed(a.seed, 5000 + k));
            p.add(verify_lu_invariance(&s, &u, 0.0)?.worst_error());
        }
        p.record(tol(1e-9), &mut report);
    }
    Ok(report)
}
