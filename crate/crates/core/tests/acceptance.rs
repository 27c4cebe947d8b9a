//! Acceptance suite. Every criterion prints one `[PASS]`/`[FAIL]` line; the
//! criteria run one after another inside a single test so the timing
//! measurements never share the machine with other tests in this binary.
//!
//! Run with `cargo test -p revgrad --test acceptance`.

mod common;

use common::*;
use revgrad::bench::{draw_params, fit_log_log, run_bench, BenchConfig, Method};
use revgrad::grad::DEFAULT_FD_STEP;
use revgrad::*;

const FD_STEP: f64 = DEFAULT_FD_STEP;

fn zero(n: usize) -> StateVector {
    StateVector::basis(n, 0).unwrap()
}

fn mixed_observable(n: usize) -> Observable {
    let zx: String = (0..n).map(|q| if q % 2 == 0 { 'Z' } else { 'X' }).collect();
    let y: String = (0..n).map(|q| if q == n - 1 { 'Y' } else { 'I' }).collect();
    Observable::from_terms(
        n,
        [(c(0.7, 0.0), "H".repeat(n).as_str()), (c(-0.5, 0.0), zx.as_str()), (c(0.3, 0.0), y.as_str())],
    )
    .unwrap()
}

/// One parametrised gate per parameter, no fixed gates.
fn chain(num_params: usize) -> Circuit {
    let mut circuit = Circuit::new(3, num_params);
    for k in 0..num_params {
        let g = match k % 4 {
            0 => Gate::rx(k % 3, k),
            1 => Gate::ry((k + 1) % 3, k),
            2 => Gate::crz(k % 3, (k + 2) % 3, k).unwrap(),
            _ => Gate::pauli_rotation(&[(0, Pauli::X), (2, Pauli::Z)], k).unwrap(),
        };
        circuit.push(g).unwrap();
    }
    circuit
}

fn oracle_triangle() -> bool {
    let n = 4;
    let obs = mixed_observable(n);
    let (mut worst_ref, mut worst_fd, mut cases) = (0.0f64, 0.0f64, 0);
    for family in Family::ALL {
        let reps: [usize; 3] = if family == Family::C { [1, 7, 15] } else { [2, 8, 16] };
        for r in reps {
            let circuit = build_ansatz(&AnsatzSpec::new(family, n, r)).unwrap();
            for seed in 0..5 {
                let params = draw_params(seed, r, circuit.num_params());
                let rev = reverse_mode_gradient(&circuit, &params, &obs, &zero(n)).unwrap();
                let refg = reference_gradient(&circuit, &params, &obs, &zero(n)).unwrap();
                let fd = finite_difference_gradient(&circuit, &params, &obs, &zero(n), FD_STEP).unwrap();
                worst_ref = worst_ref.max(rev.max_abs_diff(&refg));
                worst_fd = worst_fd.max(rev.max_abs_diff(&fd));
                cases += 1;
            }
        }
    }
    let passed = worst_ref <= 1e-11 && worst_fd <= 1e-6;
    verdict(
        "1 oracle triangle",
        passed,
        format!("{cases} cases, max|rev-ref| = {worst_ref:.2e} (<= 1e-11), max|rev-fd| = {worst_fd:.2e} (<= 1e-6)"),
    );
    passed
}

fn operation_counts() -> bool {
    let obs = mixed_observable(3);
    let mut failures = Vec::new();
    for p in [10u64, 100, 500] {
        let circuit = chain(p as usize);
        let params = draw_params(7, 1, p as usize);
        let rev = reverse_mode_gradient(&circuit, &params, &obs, &zero(3)).unwrap().counters;
        let refg = reference_gradient(&circuit, &params, &obs, &zero(3)).unwrap().counters;
        let ok = rev.gate_applies == 3 * p - 1
            && rev.clones == p + 2
            && rev.inner_products == p
            && rev.observable_applies == 1
            && refg.gate_applies == p * p;
        if !ok {
            failures.push(format!("P={p}: reverse {rev:?}, reference {refg:?}"));
        }
    }
    let passed = failures.is_empty();
    let detail = if passed {
        "P in {10, 100, 500}: reverse 3P-1 gates, P+2 clones, P inner products, 1 observable; reference P^2 gates".into()
    } else {
        failures.join("; ")
    };
    verdict("2 exact operation counts", passed, detail);
    passed
}

fn scaling_separation() -> bool {
    let config = BenchConfig::new(Family::C, 4, vec![4, 9, 19, 39, 79, 161]);
    let outcome = run_bench(&config).unwrap();
    let slope = |m: Method| outcome.fit(m).map(|f| f.slope).unwrap_or(f64::NAN);
    let (rev_slope, ref_slope) = (slope(Method::Reverse), slope(Method::Reference));

    let largest = outcome.records().map(|r| r.num_params).max().unwrap();
    let mean_at = |m: Method| {
        outcome
            .records()
            .find(|r| r.method == m && r.num_params == largest)
            .map(|r| r.mean_runtime_seconds)
            .unwrap()
    };
    let ratio = mean_at(Method::Reference) / mean_at(Method::Reverse);

    // Counter-based slopes over P >= 50 are deterministic.
    let count_slope = |m: Method| {
        let points: Vec<(f64, f64)> = outcome
            .records()
            .filter(|r| r.method == m && r.num_params >= 50)
            .map(|r| (r.num_params as f64, r.gate_applies as f64))
            .collect();
        fit_log_log(&points).unwrap().0
    };
    let (rev_count, ref_count) = (count_slope(Method::Reverse), count_slope(Method::Reference));

    let passed = (0.75..=1.35).contains(&rev_slope)
        && (1.65..=2.35).contains(&ref_slope)
        && ratio >= 20.0
        && (rev_count - 1.0).abs() <= 0.02
        && (ref_count - 2.0).abs() <= 0.02;
    verdict(
        "3 scaling separation",
        passed,
        format!(
            "P 40..{largest}, 24 reps: slope reverse {rev_slope:.3} (0.75..1.35), reference {ref_slope:.3} (1.65..2.35), \
             ratio at P={largest} {ratio:.1} (>= 20); gate-count slopes {rev_count:.4} / {ref_count:.4}"
        ),
    );
    passed
}

fn custom_matrix() -> ParametricMatrix {
    ParametricMatrix::new("twist", 1, |p: &[f64]| {
        let (cs, sn) = (p[0].cos(), p[0].sin());
        SmallMatrix::from_rows2([
            [c(cs, 0.0), C64::from_polar(-sn, p[0] / 3.0)],
            [c(sn, 0.0), C64::from_polar(cs, p[0] / 3.0)],
        ])
    })
}

fn gate_derivatives() -> bool {
    let gates = [
        ("Rx", Gate::rx(1, 0)),
        ("Ry", Gate::ry(0, 0)),
        ("Rz", Gate::rz(2, 0)),
        ("XY", Gate::pauli_rotation(&[(0, Pauli::X), (2, Pauli::Y)], 0).unwrap()),
        ("Phase", Gate::phase(1, 0)),
        ("CRx", Gate::crx(2, 0, 0).unwrap()),
        ("custom", Gate::parametric(custom_matrix(), vec![1], vec![0]).unwrap()),
    ];
    let mut r = rng(2024);
    let mut worst: Vec<(&str, f64)> = Vec::new();
    for (name, gate) in &gates {
        let mut w = 0.0f64;
        for step in 0..8 {
            let theta = -3.0 + 6.0 * step as f64 / 7.0 + 0.1;
            for _ in 0..20 {
                let psi = random_state(&mut r, 3);
                let mut d = psi.clone();
                let scalar = gate.apply_derivative(&mut d, &[theta], 0).unwrap();
                d.scale(scalar);
                let mut plus = psi.clone();
                gate.apply(&mut plus, &[theta + FD_STEP]).unwrap();
                let mut minus = psi.clone();
                gate.apply(&mut minus, &[theta - FD_STEP]).unwrap();
                plus.add_scaled(c(-1.0, 0.0), &minus).unwrap();
                plus.scale(c(0.5 / FD_STEP, 0.0));
                w = w.max(max_diff(&d, &plus));
            }
        }
        worst.push((name, w));
    }
    let passed = worst.iter().all(|(_, w)| *w <= 1e-7);
    let detail: Vec<String> = worst.iter().map(|(n, w)| format!("{n} {w:.1e}")).collect();
    verdict(
        "4 gate derivatives",
        passed,
        format!("8 angles x 20 states, max per-amplitude error (<= 1e-7): {}", detail.join(", ")),
    );
    passed
}

fn extensions() -> bool {
    let mut parts = Vec::new();

    // (a) repeated parameters
    let circuit = build_ansatz(&AnsatzSpec::new(Family::B, 3, 2)).unwrap();
    let mut shared = Circuit::new(3, 4);
    for (k, g) in circuit.gates().iter().enumerate() {
        let g = match g.param_refs() {
            [_] => match k % 3 {
                0 => Gate::ry(g.targets()[0], k % 4),
                1 => Gate::rz(g.targets()[0], (k + 1) % 4),
                _ => Gate::rx(g.targets()[0], (k + 2) % 4),
            },
            _ => g.clone(),
        };
        shared.push(g).unwrap();
    }
    let obs = mixed_observable(3);
    let params = [0.3, -1.2, 2.5, 0.8];
    let (unique, map) = uniquify_parameters(&shared);
    let literal = map.merge(
        &reverse_mode_gradient(&unique, &map.expand_params(&params), &obs, &zero(3))
            .unwrap()
            .values,
    );
    let acc = reverse_mode_gradient(&shared, &params, &obs, &zero(3)).unwrap();
    let fd = finite_difference_gradient(&shared, &params, &obs, &zero(3), FD_STEP).unwrap();
    let a_pipe = max_diff_values(&literal, &acc.values);
    let a_fd = max_diff_values(&literal, &fd.values).max(acc.max_abs_diff(&fd));
    let a = a_pipe <= 1e-12 && a_fd <= 1e-6;
    parts.push(format!("(a) uniquify {a_pipe:.1e}, fd {a_fd:.1e}"));

    // (b) two-angle custom gate
    let u2 = ParametricMatrix::new("u2", 2, |p: &[f64]| {
        let (cs, sn) = ((p[0] / 2.0).cos(), (p[0] / 2.0).sin());
        SmallMatrix::from_rows2([
            [c(cs, 0.0), -C64::from_polar(sn, p[1])],
            [c(sn, 0.0), C64::from_polar(cs, p[1])],
        ])
    });
    let circuit = Circuit::new(2, 3)
        .with(Gate::h(0))
        .unwrap()
        .with(Gate::parametric(u2.clone(), vec![0], vec![0, 1]).unwrap())
        .unwrap()
        .with(Gate::parametric(u2, vec![1], vec![2, 0]).unwrap().controlled_by(vec![0]).unwrap())
        .unwrap()
        .with(Gate::ry(1, 1))
        .unwrap();
    let obs2 = mixed_observable(2);
    let params = [0.6, -0.9, 1.4];
    let b_err = reverse_mode_gradient(&circuit, &params, &obs2, &zero(2))
        .unwrap()
        .max_abs_diff(&finite_difference_gradient(&circuit, &params, &obs2, &zero(2), FD_STEP).unwrap());
    let b = b_err <= 1e-6;
    parts.push(format!("(b) two-angle gate {b_err:.1e}"));

    // (c) non-unitary invertible gate
    let squeeze = ParametricMatrix::new("squeeze", 1, |p: &[f64]| {
        let (cs, sn) = ((p[0] / 2.0).cos(), (p[0] / 2.0).sin());
        SmallMatrix::from_rows2([[c(cs, 0.0), c(-sn, 0.0)], [c(2.0 * sn, 0.0), c(2.0 * cs, 0.0)]])
    });
    let circuit = Circuit::new(2, 2)
        .with(Gate::ry(0, 0))
        .unwrap()
        .with(Gate::non_unitary(squeeze, vec![1], vec![1]).unwrap())
        .unwrap()
        .with(Gate::cx(1, 0).unwrap())
        .unwrap()
        .with(Gate::rx(1, 0))
        .unwrap();
    let params = [0.35, 1.1];
    let c_err = reverse_mode_gradient(&circuit, &params, &obs2, &zero(2))
        .unwrap()
        .max_abs_diff(&finite_difference_gradient(&circuit, &params, &obs2, &zero(2), FD_STEP).unwrap());
    let cc = c_err <= 1e-6;
    parts.push(format!("(c) non-unitary {c_err:.1e}"));

    // (d) non-Hermitian operator
    let ry = Circuit::new(1, 1).with(Gate::ry(0, 0)).unwrap();
    let lower = Observable::from_terms(1, [(c(1.0, 0.0), "-")]).unwrap();
    let mut d_fd = 0.0f64;
    for theta in [-2.5, -0.4, 0.9, 2.0] {
        let nh = non_hermitian_gradient(&ry, &[theta], &lower, &zero(1)).unwrap();
        let fd = finite_difference_gradient(&ry, &[theta], &lower, &zero(1), FD_STEP).unwrap();
        d_fd = d_fd.max(nh.max_abs_diff(&fd));
    }
    let mut d_red = 0.0f64;
    for family in Family::ALL {
        let circuit = build_ansatz(&AnsatzSpec::new(family, 3, 2)).unwrap();
        let params = draw_params(11, 2, circuit.num_params());
        let rev = reverse_mode_gradient(&circuit, &params, &obs, &zero(3)).unwrap();
        let nh = non_hermitian_gradient(&circuit, &params, &obs, &zero(3)).unwrap();
        d_red = d_red.max(rev.max_abs_diff(&nh));
    }
    let d = d_fd <= 1e-7 && d_red <= 1e-11;
    parts.push(format!("(d) non-Hermitian fd {d_fd:.1e}, reduction {d_red:.1e}"));

    let passed = a && b && cc && d;
    verdict("5 extensions", passed, parts.join("; "));
    passed
}

fn memory_contract() -> bool {
    let obs = mixed_observable(3);
    let mut peaks = Vec::new();
    for p in [10usize, 1000] {
        let circuit = chain(p);
        let params = draw_params(3, 1, p);
        peaks.push(reverse_mode_gradient(&circuit, &params, &obs, &zero(3)).unwrap().peak_live_states);
    }
    let passed = peaks.iter().all(|&p| p == 4);
    verdict(
        "6 memory contract",
        passed,
        format!("peak live state vectors for P = 10, 1000: {peaks:?} (expected 4)"),
    );
    passed
}

#[test]
fn acceptance() {
    let results = [
        oracle_triangle(),
        operation_counts(),
        scaling_separation(),
        gate_derivatives(),
        extensions(),
        memory_contract(),
    ];
    let failed: Vec<usize> = (1..=6).filter(|k| !results[k - 1]).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
