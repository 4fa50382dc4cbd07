//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report reaches stdout. Set
//! `ACCEPTANCE_ONLY=1,2,5` to run a subset. The Monte Carlo criteria (6 to 8)
//! take tens of minutes on one core.

use std::collections::BTreeSet;
use std::time::Instant;

use biased_qldpc::circulant::{Protograph, RingElement};
use biased_qldpc::codes::{
    bias_tailored_lifted_product, bias_tailored_protograph, classical_params, css_twisted_toric, hadamard_rotate,
    hypergraph_product, lifted_product, logical_weight_histogram, quantum_distance, tanner_girth, toric_code,
    twisted_toric_seeds, xzzx_twisted_toric, DistanceBound, RotatedCode, SearchBudget,
};
use biased_qldpc::decoder::{BpOsdDecoder, DecoderConfig};
use biased_qldpc::experiment::{run_sweep, ExperimentConfig};
use biased_qldpc::gf2::{BinaryMatrix, BinaryVector};
use biased_qldpc::io::parse_dense;
use biased_qldpc::noise::{code_priors, hashing_probability, Axis, BiasSpec, PauliChannel};
use biased_qldpc::sim::{channel_update, run_experiment, ExperimentResult, RunLimits, TrialRunner, UpdateMode};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

const REP3: &str = include_str!("../../../data/rep3.txt");
const REP2: &str = include_str!("../../../data/rep2.txt");
const SEED_16_4_6: &str = include_str!("../../../data/mkmn_16_4_6.txt");
const A3: &str = include_str!("../../../data/lp_2x3.proto");
const A13: &str = include_str!("../../../data/a13.proto");
const GB_A1: &str = include_str!("../../../data/gb882_a1.proto");
const GB_A2: &str = include_str!("../../../data/gb882_a2.proto");

/// Accumulates sub-check lines for one criterion.
struct Report {
    ok: bool,
    /// Set when a check fails that is not known to be out of reach.
    unexpected: bool,
    lines: Vec<String>,
}

impl Report {
    fn check(&mut self, pass: bool, what: impl Into<String>) {
        self.lines.push(format!("    [{}] {}", if pass { "ok" } else { "FAIL" }, what.into()));
        if !pass {
            self.ok = false;
            self.unexpected = true;
        }
    }

    /// A check whose target is provably out of reach: a failure is reported
    /// but does not fail the run.
    fn check_unattainable(&mut self, pass: bool, what: impl Into<String>, why: &str) {
        self.lines.push(format!("    [{}] {}", if pass { "ok" } else { "FAIL" }, what.into()));
        if !pass {
            self.ok = false;
            self.lines.push(format!("           known unattainable: {why}"));
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.lines.push(format!("    {}", what.into()));
    }
}

fn proto(text: &str) -> Protograph {
    text.parse().expect("bundled protograph parses")
}

fn matrix(text: &str) -> BinaryMatrix {
    parse_dense(text).expect("bundled matrix parses")
}

fn exact(b: Option<DistanceBound>) -> Option<usize> {
    b.and_then(|b| b.value())
}

fn criterion_1(r: &mut Report) {
    let t = Instant::now();
    let rep = classical_params(&matrix(REP3), 8);
    r.check(rep.to_string() == "[3,1,3]", format!("rep3 -> {rep}"));

    let a3 = proto(A3);
    let printed = matrix(
        "011100000\n101010000\n110001000\n000110010\n000011001\n000101100\n",
    );
    let h3 = a3.lift();
    let c3 = classical_params(&h3, 9);
    r.check(c3.to_string() == "[9,3,3]", format!("lift(A3) -> {c3}"));
    r.check(h3 == printed, "lift(A3) equals the printed 6x9 matrix bit for bit");

    let h13 = proto(A13).lift();
    let c13 = classical_params(&h13, 52);
    r.check(c13.to_string() == "[52,3,26]", format!("lift(A13) -> {c13}"));
    let girth = tanner_girth(&h13);
    r.check(girth == Some(6), format!("girth of lift(A13) = {girth:?}"));

    let ca = classical_params(&matrix(SEED_16_4_6), 16);
    r.check(ca.to_string() == "[16,4,6]", format!("16-bit seed matrix -> {ca}"));
    let secs = t.elapsed().as_secs_f64();
    r.check(secs < 5.0, format!("all five in {secs:.2} s"));
}

fn criterion_2(r: &mut Report) {
    let budget = SearchBudget::default();

    let toric = RotatedCode::unrotated(hypergraph_product(&matrix(REP3), &matrix(REP2)));
    let d = quantum_distance(&toric, &budget);
    r.check((toric.n(), toric.k(), exact(d.d)) == (12, 2, Some(2)), format!("HGP(rep3, rep2) -> [[{},{},{:?}]]", toric.n(), toric.k(), exact(d.d)));

    let x32 = xzzx_twisted_toric(3, 2).unwrap();
    let d = quantum_distance(&x32, &budget);
    r.check(
        (x32.n(), x32.k(), exact(d.d), exact(d.x_only)) == (12, 2, Some(3), Some(6)),
        format!("xzzx(3,2) -> [[{},{},{:?}]], infinite-bias d_X = {:?}", x32.n(), x32.k(), exact(d.d), exact(d.x_only)),
    );

    let a = matrix(SEED_16_4_6);
    let hgp = hypergraph_product(&a, &a);
    r.check((hgp.n(), hgp.k()) == (400, 16), format!("HGP(A, A) -> N={}, K={}", hgp.n(), hgp.k()));

    let a13 = proto(A13);
    let lp = lifted_product(&a13, &a13).unwrap();
    let bt = bias_tailored_lifted_product(&a13, &a13).unwrap();
    r.check((lp.n(), lp.k()) == (416, 18), format!("LP(A13, A13) -> N={}, K={}", lp.n(), lp.k()));
    r.check((bt.n(), bt.k()) == (416, 18), format!("bias-tailored LP(A13, A13) -> N={}, K={}", bt.n(), bt.k()));
    let dx = quantum_distance(&bt, &budget).x_only;
    r.check(exact(dx) == Some(26), format!("bias-tailored 416 infinite-bias d_X = {:?}", dx.map(|b| b.to_string())));

    let gb = lifted_product(&proto(GB_A1), &proto(GB_A2)).unwrap();
    r.check((gb.n(), gb.k()) == (882, 24), format!("generalized bicycle pair at L=63 -> N={}, K={}", gb.n(), gb.k()));

    let big = xzzx_twisted_toric(16, 15).unwrap();
    let d = quantum_distance(&big, &budget);
    r.check(
        (big.n(), big.k(), exact(d.d)) == (480, 2, Some(16)),
        format!("xzzx(16,15) -> [[{},{},{:?}]]", big.n(), big.k(), exact(d.d)),
    );
}

fn arb_element(lift: usize) -> impl Strategy<Value = RingElement> {
    proptest::collection::btree_set(0..lift, 0..=lift.min(3)).prop_map(move |s| RingElement::from_shifts(lift, s))
}

fn arb_proto(max_dim: usize, lift: usize) -> impl Strategy<Value = Protograph> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(m, n)| {
        proptest::collection::vec(arb_element(lift), m * n).prop_map(move |e| Protograph::from_entries(m, n, e).unwrap())
    })
}

fn arb_pair(max_dim: usize, max_lift: usize) -> impl Strategy<Value = (Protograph, Protograph)> {
    (1..=max_lift).prop_flat_map(move |l| (arb_proto(max_dim, l), arb_proto(max_dim, l)))
}

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = BinaryMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec(proptest::bool::weighted(0.3), m * n).prop_map(move |bits| {
            let rows: Vec<Vec<bool>> = bits.chunks(n).map(<[bool]>::to_vec).collect();
            BinaryMatrix::from_rows(&rows)
        })
    })
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn suite<S: Strategy>(r: &mut Report, name: &str, cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>)
where
    S::Value: std::fmt::Debug,
{
    let outcome = runner(cases).run(&strategy, test);
    match outcome {
        Ok(()) => r.check(true, format!("{name}: {cases} cases")),
        Err(e) => r.check(false, format!("{name}: {e}")),
    }
}

fn criterion_3(r: &mut Report) {
    const CASES: u32 = 128;
    suite(r, "HGP commutes", CASES, (arb_matrix(8), arb_matrix(8)), |(h1, h2)| {
        let c = hypergraph_product(&h1, &h2);
        prop_assert!(c.hx().mul(&c.hz().transpose()).unwrap().is_zero());
        Ok(())
    });
    suite(r, "lifted and bias-tailored products commute", CASES, arb_pair(8, 16), |(a1, a2)| {
        let c = lifted_product(&a1, &a2).unwrap();
        prop_assert!(c.hx().mul(&c.hz().transpose()).unwrap().is_zero());
        let bt = bias_tailored_lifted_product(&a1, &a2).unwrap();
        let (xs, zs) = bt.symplectic_checks();
        let form = xs.mul(&zs.transpose()).unwrap();
        prop_assert_eq!(form.clone(), form.transpose());
        Ok(())
    });
    suite(
        r,
        "lift is a homomorphism for +, *, transpose",
        CASES,
        (1usize..=16).prop_flat_map(|l| (arb_proto(8, l), arb_proto(8, l), arb_proto(8, l))),
        |(a, b, c)| {
            prop_assert_eq!(a.transpose().lift(), a.lift().transpose());
            if (a.rows(), a.cols()) == (b.rows(), b.cols()) {
                let sum = a.add(&b).unwrap().lift();
                let mut expect = a.lift();
                for i in 0..expect.rows() {
                    for j in 0..expect.cols() {
                        expect.set(i, j, expect.get(i, j) ^ b.lift().get(i, j));
                    }
                }
                prop_assert_eq!(sum, expect);
            }
            if a.cols() == c.rows() {
                prop_assert_eq!(a.mul(&c).unwrap().lift(), a.lift().mul(&c.lift()).unwrap());
            }
            Ok(())
        },
    );
    suite(r, "lift is a homomorphism for the tensor product", CASES, arb_pair(3, 16), |(a, b)| {
        let t = a.tensor(&b).unwrap();
        for i in 0..t.rows() {
            for j in 0..t.cols() {
                let expect = a.get(i / b.rows(), j / b.cols()).mul(b.get(i % b.rows(), j % b.cols())).unwrap();
                prop_assert_eq!(t.get(i, j).lift(), expect.lift());
            }
        }
        Ok(())
    });
    suite(r, "length law N = L(m1 m2 + n1 n2), lift-then-HGP is L^2", CASES, arb_pair(4, 8), |(a1, a2)| {
        let l = a1.lift_size();
        let n = l * (a1.rows() * a2.rows() + a1.cols() * a2.cols());
        prop_assert_eq!(lifted_product(&a1, &a2).unwrap().n(), n);
        prop_assert_eq!(hypergraph_product(&a1.lift(), &a2.lift()).n(), l * n);
        Ok(())
    });
    suite(r, "rotation keeps (N, K) and weight-3 logical histogram", CASES, arb_pair(2, 4), |(a1, a2)| {
        let css = lifted_product(&a1, &a2).unwrap();
        let rot = hadamard_rotate(css.clone());
        prop_assert_eq!((rot.n(), rot.k()), (css.n(), css.k()));
        let plain = RotatedCode::unrotated(css);
        prop_assert_eq!(logical_weight_histogram(&plain, 3), logical_weight_histogram(&rot, 3));
        Ok(())
    });

    let toric = toric_code(3, 3);
    let plain = logical_weight_histogram(&RotatedCode::unrotated(toric.clone()), 4);
    let rot = logical_weight_histogram(&hadamard_rotate(toric), 4);
    r.check(plain == rot, format!("toric 3x3 histogram to weight 4 unchanged by rotation: {plain:?}"));

    // Infinite-bias decoupling of A_Z.
    let a13 = proto(A13);
    let (_, az) = bias_tailored_protograph(&a13, &a13).unwrap();
    let a = a13.lift();
    let at = a13.transpose().lift();
    let mut expect = a.clone();
    for _ in 0..3 {
        expect = expect.block_diag(&a);
    }
    for _ in 0..4 {
        expect = expect.block_diag(&at);
    }
    r.check(az.lift() == expect, "A13 bias-tailored A_Z = diag(A, A, A, A, A^T, A^T, A^T, A^T)");
    let (a1, a2) = twisted_toric_seeds(5, 4).unwrap();
    let (_, az) = bias_tailored_protograph(&a1, &a2).unwrap();
    r.check(az.lift() == a2.lift().block_diag(&a2.transpose().lift()), "1x1 seeds: A_Z = diag(A2, A2^T)");
}

fn criterion_4(r: &mut Report) {
    let p0 = hashing_probability(0.0, Axis::X, 0.5).unwrap();
    r.check((p0 - 0.189).abs() <= 0.001, format!("depolarising p_H(0) = {p0:.6}"));
    let p6 = hashing_probability(0.0, Axis::X, 1e6).unwrap();
    r.check_unattainable(
        (p6 - 0.500).abs() <= 0.001,
        format!("eta = 1e6 p_H(0) = {p6:.6} (target 0.500 +- 0.001)"),
        "the exact root at eta = 1e6 is 0.498035; only eta = inf reaches 0.5",
    );
    let pinf = hashing_probability(0.0, Axis::X, f64::INFINITY).unwrap();
    r.note(format!("eta = inf p_H(0) = {pinf:.6}"));
    let grid = [0.5, 1.0, 3.0, 10.0, 1e2, 1e3, 1e6];
    let values: Vec<f64> = grid.iter().map(|&e| hashing_probability(0.0, Axis::X, e).unwrap()).collect();
    let monotone = values.windows(2).all(|w| w[1] >= w[0]);
    let shown: Vec<String> = grid.iter().zip(&values).map(|(e, p)| format!("{e}:{p:.4}")).collect();
    r.check(monotone, format!("monotone over grid [{}]", shown.join(" ")));
}

/// The 3N single-qubit Paulis as CSS-frame `(e_X, e_Z)` pairs.
fn single_qubit_errors(code: &RotatedCode) -> Vec<(String, BinaryVector, BinaryVector)> {
    let n = code.n();
    let mut out = Vec::new();
    for q in 0..n {
        for pauli in ['X', 'Y', 'Z'] {
            // A Hadamard swaps X and Z.
            let (has_x, has_z) = match (pauli, code.is_rotated(q)) {
                ('Y', _) => (true, true),
                ('X', false) | ('Z', true) => (true, false),
                _ => (false, true),
            };
            let ex = if has_x { BinaryVector::from_support(n, &[q]) } else { BinaryVector::zeros(n) };
            let ez = if has_z { BinaryVector::from_support(n, &[q]) } else { BinaryVector::zeros(n) };
            out.push((format!("{pauli}{q}"), ex, ez));
        }
    }
    out
}

/// Most single-qubit errors any syndrome decoder can correct: errors sharing
/// a syndrome but differing by a logical cannot both be fixed.
fn optimal_single_qubit_count(code: &RotatedCode) -> usize {
    let css = code.css();
    let mut classes: std::collections::BTreeMap<(Vec<u8>, Vec<u8>), std::collections::BTreeMap<(Vec<u8>, Vec<u8>), usize>> =
        Default::default();
    for (_, ex, ez) in single_qubit_errors(code) {
        let syndrome = (css.hz().matvec(&ex).unwrap().to_bits(), css.hx().matvec(&ez).unwrap().to_bits());
        let logical = (css.lz().matvec(&ex).unwrap().to_bits(), css.lx().matvec(&ez).unwrap().to_bits());
        *classes.entry(syndrome).or_default().entry(logical).or_default() += 1;
    }
    classes.values().map(|c| c.values().copied().max().unwrap_or(0)).sum()
}

/// Exhaustive single-qubit Paulis, asserting `H·r = s` on every decode.
fn single_qubit_sweep(r: &mut Report, name: &str, code: &RotatedCode) {
    let css = code.css();
    let cfg = DecoderConfig::default();
    let priors = code_priors(code, PauliChannel::depolarizing(0.01).unwrap());
    let mut dec_x = BpOsdDecoder::new(css.hz(), cfg.clone()).unwrap();
    let mut dec_z = BpOsdDecoder::new(css.hx(), cfg.clone()).unwrap();
    let mut runner = TrialRunner::new(code, &cfg).unwrap();
    let (mut corrected, mut cases, mut syndrome_ok) = (0, 0, true);
    for (label, ex, ez) in single_qubit_errors(code) {
        let sx = css.hz().matvec(&ex).unwrap();
        let sz = css.hx().matvec(&ez).unwrap();
        let rx = dec_x.decode(&sx, &priors.px_eff).unwrap().recovery;
        let rz = dec_z.decode(&sz, &channel_update(&rx, &priors)).unwrap().recovery;
        syndrome_ok &= css.hz().matvec(&rx).unwrap() == sx && css.hx().matvec(&rz).unwrap() == sz;
        assert!(syndrome_ok, "{name}: recovery does not reproduce the syndrome for {label}");
        let mut res_x = rx;
        res_x.xor_assign(&ex);
        let mut res_z = rz;
        res_z.xor_assign(&ez);
        let logical = css.lz().matvec(&res_x).unwrap().weight() + css.lx().matvec(&res_z).unwrap().weight() > 0;
        let via_runner = runner.decode_error(&ex, &ez, &priors, UpdateMode::XToZ).unwrap().success;
        assert_eq!(via_runner, !logical, "{name}: trial runner disagrees on {label}");
        cases += 1;
        corrected += usize::from(!logical);
    }
    let best = optimal_single_qubit_count(code);
    r.check(syndrome_ok, format!("{name}: H.r = s on all {cases} decodes"));
    r.note(format!("{name}: no syndrome decoder can correct more than {best}/{cases}"));
    let what = format!("{name}: {corrected}/{cases} single-qubit errors corrected");
    if best < cases {
        r.check_unattainable(corrected == cases, what, "distance 2 leaves single-qubit errors that share a syndrome and differ by a logical");
    } else {
        r.check(corrected == cases, what);
    }
}

fn criterion_5(r: &mut Report) {
    single_qubit_sweep(r, "[[12,2,3]] XZZX twisted toric", &xzzx_twisted_toric(3, 2).unwrap());
    let toric = RotatedCode::unrotated(hypergraph_product(&matrix(REP3), &matrix(REP2)));
    single_qubit_sweep(r, "[[12,2,2]] toric", &toric);
    let a13 = proto(A13);
    single_qubit_sweep(r, "[[416,18]] bias-tailored", &bias_tailored_lifted_product(&a13, &a13).unwrap());
}

fn run_point(code: &RotatedCode, eta: f64, p: f64, cfg: &DecoderConfig, update: UpdateMode, trials: u64, seed: u64) -> ExperimentResult {
    let t = Instant::now();
    let res = run_experiment(code, BiasSpec::new(Axis::X, eta, p), cfg, update, RunLimits::fixed(trials), seed).unwrap();
    eprintln!(
        "  N={} eta={eta} p={p} {update}: {}/{} failures, P_W = {:.3e} ({:.0} s)",
        code.n(),
        res.failures,
        res.trials,
        res.p_w(),
        t.elapsed().as_secs_f64()
    );
    res
}

fn describe(label: &str, res: &ExperimentResult) -> String {
    format!("{label}: P_W = {:.3e} +- {:.1e} ({} failures / {})", res.p_w(), res.stderr_w(), res.failures, res.trials)
}

/// `a - b` in units of their combined standard error.
fn z_score(a: &ExperimentResult, b: &ExperimentResult) -> f64 {
    let s = (a.stderr_w().powi(2) + b.stderr_w().powi(2)).sqrt();
    if s == 0.0 {
        if a.p_w() == b.p_w() { 0.0 } else { f64::INFINITY.copysign(a.p_w() - b.p_w()) }
    } else {
        (a.p_w() - b.p_w()) / s
    }
}

fn criterion_6(r: &mut Report) {
    const TRIALS: u64 = 100_000;
    const RARE_TRIALS: u64 = 1_000_000;
    let (n1, n2, p) = (16, 15, 0.06);
    let cfg = DecoderConfig::default();
    let rotated = xzzx_twisted_toric(n1, n2).unwrap();
    let css = RotatedCode::unrotated(css_twisted_toric(n1, n2).unwrap());
    r.note(format!(
        "xzzx_twisted_toric({n1},{n2}), p = {p}, {TRIALS} trials per point ({RARE_TRIALS} for rotated eta=100), BP+OSD-0, X->Z update"
    ));
    let rot_lo = run_point(&rotated, 0.5, p, &cfg, UpdateMode::XToZ, TRIALS, 601);
    let rot_hi = run_point(&rotated, 100.0, p, &cfg, UpdateMode::XToZ, RARE_TRIALS, 602);
    let css_lo = run_point(&css, 0.5, p, &cfg, UpdateMode::XToZ, TRIALS, 603);
    let css_hi = run_point(&css, 100.0, p, &cfg, UpdateMode::XToZ, TRIALS, 604);
    for (label, res) in [("rotated eta=0.5", &rot_lo), ("rotated eta=100", &rot_hi), ("CSS eta=0.5", &css_lo), ("CSS eta=100", &css_hi)] {
        r.note(describe(label, res));
    }
    r.check(rot_hi.p_w() < rot_lo.p_w() / 10.0, "rotated: P_W(100) < P_W(0.5) / 10");
    r.check(css_hi.p_w() >= css_lo.p_w(), "CSS: P_W(100) >= P_W(0.5)");
    let z = z_score(&rot_lo, &css_lo);
    r.check(z.abs() <= 3.0, format!("eta=0.5: rotated and CSS agree, |z| = {:.2} <= 3", z.abs()));
}

fn a13_code() -> RotatedCode {
    let a13 = proto(A13);
    bias_tailored_lifted_product(&a13, &a13).unwrap()
}

fn criterion_7(r: &mut Report) {
    const TRIALS: u64 = 100_000;
    const PLATEAU_TRIALS: u64 = 400_000;
    let code = a13_code();
    let cfg = DecoderConfig { osd_order: 7, ..DecoderConfig::default() };
    r.note(format!(
        "[[416,18]] bias-tailored, p = 0.08, {TRIALS} trials at eta 0.5 and 10, {PLATEAU_TRIALS} at 1e3 and 1e6, BP+OSD-7, X->Z update"
    ));
    let pts: Vec<ExperimentResult> = [(0.5, TRIALS), (10.0, TRIALS), (1e3, PLATEAU_TRIALS), (1e6, PLATEAU_TRIALS)]
        .iter()
        .enumerate()
        .map(|(i, &(eta, trials))| run_point(&code, eta, 0.08, &cfg, UpdateMode::XToZ, trials, 700 + i as u64))
        .collect();
    for (label, res) in ["eta=0.5", "eta=10", "eta=1e3", "eta=1e6"].iter().zip(&pts) {
        r.note(describe(label, res));
    }
    let ratio = pts[0].p_w() / pts[1].p_w();
    r.check(ratio >= 10.0, format!("P_W(0.5) / P_W(10) = {ratio:.1} >= 10"));
    let z = z_score(&pts[2], &pts[3]);
    r.check(z.abs() < 3.0, format!("plateau: |P_W(1e3) - P_W(1e6)| = {:.2} sigma < 3", z.abs()));
}

fn criterion_8(r: &mut Report) {
    const TRIALS: u64 = 100_000;
    let code = a13_code();
    let cfg = DecoderConfig { osd_order: 7, ..DecoderConfig::default() };
    r.note(format!("[[416,18]] bias-tailored, depolarising, {TRIALS} trials per point, BP+OSD-7, common seeds"));
    for (i, p) in [0.06, 0.08].into_iter().enumerate() {
        let seed = 800 + i as u64;
        let on = run_point(&code, 0.5, p, &cfg, UpdateMode::XToZ, TRIALS, seed);
        let off = run_point(&code, 0.5, p, &cfg, UpdateMode::Off, TRIALS, seed);
        r.note(describe(&format!("p={p} update on"), &on));
        r.note(describe(&format!("p={p} update off"), &off));
        let z = z_score(&on, &off);
        r.check(z <= 3.0, format!("p={p}: P_W(on) <= P_W(off) within 3 sigma (z = {z:.2})"));
    }
}

fn criterion_9(r: &mut Report) {
    let cfg = ExperimentConfig::from_json(
        r#"{
            "code": { "kind": "xzzx_toric", "n1": 4, "n2": 3 },
            "eta": [0.5, 10, "inf"],
            "p": [0.05, 0.1],
            "trials": 4000,
            "min_failures": 50,
            "batch_size": 500,
            "seed": 9,
            "update": "x_to_z"
        }"#,
    )
    .unwrap();
    let code = cfg.code.build(std::path::Path::new(".")).unwrap();
    let csv_with = |threads: usize| -> String {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let mut out = Vec::new();
        pool.install(|| run_sweep(&cfg, &code, &mut out, |_| {})).unwrap();
        String::from_utf8(out).unwrap()
    };
    let rows = |csv: &str| -> Vec<String> { csv.lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect() };
    let one = csv_with(1);
    let again = csv_with(1);
    let many = csv_with(4);
    r.check(rows(&one).len() == 1 + 6, format!("{} data rows", rows(&one).len() - 1));
    r.check(one == again, "rerun at 1 thread is byte-identical");
    r.check(one == many, "1 thread and 4 threads are byte-identical");
    let distinct: BTreeSet<String> = rows(&one).into_iter().collect();
    r.check(distinct.len() == 7, "rows are distinct");
}

fn main() {
    let only: Option<BTreeSet<u32>> =
        std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let criteria: [(u32, &str, fn(&mut Report)); 9] = [
        (1, "classical parameters", criterion_1),
        (2, "quantum parameters", criterion_2),
        (3, "structural invariants", criterion_3),
        (4, "hashing bound", criterion_4),
        (5, "decoder soundness", criterion_5),
        (6, "bias trend, twisted toric", criterion_6),
        (7, "plateau, [[416,18]]", criterion_7),
        (8, "channel update benefit", criterion_8),
        (9, "determinism", criterion_9),
    ];
    let mut unexpected = Vec::new();
    let mut summary = Vec::new();
    for (id, title, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let t = Instant::now();
        let mut report = Report { ok: true, unexpected: false, lines: Vec::new() };
        run(&mut report);
        let status = if report.ok { "PASS" } else { "FAIL" };
        let line = format!("criterion {id} {status}: {title} ({:.1} s)", t.elapsed().as_secs_f64());
        println!("{line}");
        for l in &report.lines {
            println!("{l}");
        }
        if report.unexpected {
            unexpected.push(id);
        }
        summary.push(line);
    }
    println!("\nsummary:");
    for l in &summary {
        println!("  {l}");
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
