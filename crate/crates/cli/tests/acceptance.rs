//! Acceptance run: each criterion prints one PASS or FAIL line with its
//! measurements, and the process fails if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use kval_cli::roundtrip;
use kval_core::calculus::monotone_probes;
use kval_core::text::parse_rule;
use kval_core::valuation::{inv_generator, inv_var, monomial_with_valuation};
use kval_core::{
    classify_extremum, monotone_certificate, picard_invert, series_reversion_oracle, val, Coeff,
    ExtremumVerdict, FieldElem, GammaVal, MonotoneOutcome, PowerSeries, Sign, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
    cases: usize,
}

impl Check {
    fn new() -> Self {
        Check {
            failures: Vec::new(),
            notes: Vec::new(),
            cases: 0,
        }
    }

    fn case(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

fn report(id: &str, title: &str, limit: Duration, run: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let check = run();
    let took = start.elapsed();
    let in_time = took < limit;
    let pass = check.failures.is_empty() && in_time;
    println!(
        "{id} {} {title}: {} checks, {} failures, {:.2} s (limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        check.cases,
        check.failures.len(),
        took.as_secs_f64(),
        limit.as_secs()
    );
    for f in check.failures.iter().take(3) {
        println!("    {f}");
    }
    if check.failures.len() > 3 {
        println!("    ... {} more", check.failures.len() - 3);
    }
    for n in &check.notes {
        println!("    note: {n}");
    }
    pass
}

fn q(n: i64, d: i64) -> Coeff {
    Coeff::new(n.into(), d.into())
}

fn c(n: i64) -> FieldElem {
    FieldElem::from_int(n)
}

fn x(n: u32) -> FieldElem {
    FieldElem::var(n)
}

fn rational(rng: &mut ChaCha8Rng) -> Coeff {
    q(rng.random_range(-9..=9), rng.random_range(1..=5))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Coeff {
    loop {
        let r = rational(rng);
        if r != q(0, 1) {
            return r;
        }
    }
}

fn laurent_monomial(rng: &mut ChaCha8Rng, vars: u32) -> FieldElem {
    let exps: Vec<(u32, i64)> = (1..=vars).map(|i| (i, rng.random_range(-3..=3))).collect();
    FieldElem::monomial(nonzero_rational(rng), &exps)
}

fn poly(rng: &mut ChaCha8Rng, vars: u32) -> FieldElem {
    let terms = rng.random_range(1..=3);
    let mut p = FieldElem::zero();
    for _ in 0..terms {
        let exps: Vec<(u32, i64)> = (1..=vars).map(|i| (i, rng.random_range(0..=2))).collect();
        p = &p + &FieldElem::monomial(rational(rng), &exps);
    }
    p
}

fn field(rng: &mut ChaCha8Rng, vars: u32) -> FieldElem {
    let num = poly(rng, vars);
    loop {
        let den = poly(rng, vars);
        if !den.is_zero() {
            return num.div(&den).expect("nonzero denominator");
        }
    }
}

fn nonzero_field(rng: &mut ChaCha8Rng, vars: u32) -> FieldElem {
    loop {
        let a = field(rng, vars);
        if !a.is_zero() {
            return a;
        }
    }
}

fn horner(coeffs: &[FieldElem], z: &FieldElem) -> FieldElem {
    coeffs.iter().rev().fold(FieldElem::zero(), |acc, a| &(&acc * z) + a)
}

/// Coefficients around `0` of `Σ b_n (z - u)^n`.
fn expand_at_zero(b: &[FieldElem], u: &FieldElem) -> Vec<FieldElem> {
    let s = PowerSeries::polynomial(u.clone(), b.to_vec()).recenter(&FieldElem::zero()).unwrap();
    (0..b.len()).map(|n| s.coeff(n)).collect()
}

fn series(coeffs: Vec<FieldElem>) -> PowerSeries {
    PowerSeries::polynomial(FieldElem::zero(), coeffs)
}

fn cubic() -> Vec<FieldElem> {
    vec![c(0), -x(1), c(0), FieldElem::from_ratio(1, 3)]
}

fn a1(rng: &mut ChaCha8Rng) -> Check {
    let mut k = Check::new();
    for _ in 0..1000 {
        let (a, b, d) = (field(rng, 4), field(rng, 4), field(rng, 4));
        let (va, vb) = (val(&a), val(&b));
        k.case(val(&(&a * &b)) == &va * &vb, || format!("v(ab) != v(a)v(b) for a = {a}, b = {b}"));
        let vs = val(&(&a + &b));
        k.case(vs <= va.clone().max(vb.clone()), || format!("v(a+b) > max for a = {a}, b = {b}"));
        if va != vb {
            k.case(vs == va.clone().max(vb.clone()), || format!("strict max fails for a = {a}, b = {b}"));
        }
        let vd = val(&d);
        k.case(
            val(&(&(&a + &b) + &d)) <= va.max(vb).max(vd),
            || format!("v(a+b+d) > max for a = {a}, b = {b}, d = {d}"),
        );
    }
    k
}

fn a2(rng: &mut ChaCha8Rng) -> Check {
    let mut k = Check::new();
    let mut corrected = 0usize;
    for i in 0..500 {
        let n = rng.random_range(1..=5u32);
        let a = field(rng, 4);
        // differences spanning the scales near X_n^{-1}
        let t = match i % 4 {
            0 => inv_var(n).scale(&nonzero_rational(rng)),
            1 => &inv_var(n) * &inv_var(rng.random_range(1..=5)),
            2 => laurent_monomial(rng, 5),
            _ => nonzero_field(rng, 5),
        };
        let xv = &a + &t;
        let d = &xv - &a;
        let in_order_ball = d.abs() < inv_var(n);
        let in_val_ball = val(&d) < inv_generator(n);
        k.case(!in_order_ball || in_val_ball, || {
            format!("|x - a| < 1/X{n} but v(x - a) = {} is not below g{n}^-1, x - a = {d}", val(&d))
        });
        if n >= 2 {
            k.case(!in_val_ball || d.abs() < inv_var(n - 1), || {
                format!("v(x - a) < g{n}^-1 but |x - a| >= 1/X{}, x - a = {d}", n - 1)
            });
        }
        let closed_ok = !in_order_ball || val(&d) <= inv_generator(n);
        let open_ok = !in_val_ball || d.abs() < inv_var(n);
        if !(closed_ok && open_ok) {
            corrected += 1;
        }

        let (p, r) = (nonzero_field(rng, 4).abs(), nonzero_field(rng, 4).abs());
        let (lo, hi) = if p <= r { (p, r) } else { (r, p) };
        k.case(val(&lo) <= val(&hi), || format!("0 < {lo} <= {hi} but v decreases"));
    }
    k.notes.push(format!(
        "closed-ball form |x - a| < 1/Xn => v(x - a) <= gn^-1, with v(x - a) < gn^-1 => |x - a| < 1/Xn: {corrected} failures"
    ));
    k
}

fn a3() -> Check {
    let mut k = Check::new();
    let depth = 6;
    let stream = PowerSeries::with_bound(FieldElem::zero(), vec![c(0)], parse_rule("g(n)^-1").unwrap(), vec![])
        .unwrap();
    let verdict = stream.convergence_check(depth).unwrap();
    let expected: Vec<u64> = (1..=depth as u64).map(|m| m + 1).collect();
    k.case(verdict == Verdict::Converges { schedule: expected }, || format!("X_n^-1 stream: {verdict}"));
    let stream = PowerSeries::with_bound(FieldElem::zero(), vec![c(0)], parse_rule("g1^-n").unwrap(), vec![])
        .unwrap();
    let verdict = stream.convergence_check(depth).unwrap();
    k.case(
        matches!(verdict, Verdict::DivergesAt { m: 2, .. }),
        || format!("X_1^-n stream: {verdict}"),
    );
    k
}

fn a4(rng: &mut ChaCha8Rng) -> Check {
    let mut k = Check::new();
    let radii = [inv_generator(1), GammaVal::one(), GammaVal::generator(1), GammaVal::generator(2)];
    for _ in 0..20 {
        let len = rng.random_range(1..=5);
        let coeffs: Vec<FieldElem> = (0..len)
            .map(|_| match rng.random_range(0..3) {
                0 => FieldElem::zero(),
                1 => laurent_monomial(rng, 2),
                _ => field(rng, 2),
            })
            .collect();
        let center = if rng.random_bool(0.5) { FieldElem::zero() } else { laurent_monomial(rng, 2) };
        let f = PowerSeries::polynomial(center.clone(), coeffs.clone());
        for r in &radii {
            let (norm, _) = f.sup_norm_ball(r).unwrap();
            let unit = monomial_with_valuation(r).unwrap();
            let mut attained = false;
            for s in 1..=10 {
                let h = unit.scale(&q(s, 1));
                let v = val(&horner(&coeffs, &h));
                k.case(v <= norm, || format!("v(f(z)) = {v} exceeds the norm {norm} at z - center = {h}"));
                attained |= v == norm;
            }
            k.case(attained, || format!("norm {norm} not attained on radius {r} for f = {f}"));
        }
    }
    k
}

fn a5(rng: &mut ChaCha8Rng) -> Check {
    let mut k = Check::new();
    let centers = [FieldElem::zero(), c(1), inv_var(1), x(1)];
    for i in 0..50 {
        let x0 = if i % 5 == 4 { laurent_monomial(rng, 2) } else { centers[i % 4].clone() };
        let m = rng.random_range(1..=4usize);
        let mut b = vec![FieldElem::zero(); m + 1];
        b[0] = field(rng, 2);
        b[m] = nonzero_field(rng, 2);
        for extra in 0..rng.random_range(0..=2) {
            b.push(if extra % 2 == 0 { field(rng, 2) } else { laurent_monomial(rng, 2) });
        }
        let a = expand_at_zero(&b, &x0);
        let f = series(a.clone());
        let r = match classify_extremum(&f, &x0) {
            Ok(r) => r,
            Err(e) => {
                k.case(false, || format!("classify failed at {x0}: {e}"));
                continue;
            }
        };
        let base = horner(&a, &x0);
        let signs: Vec<Sign> = r
            .samples
            .iter()
            .map(|s| (&horner(&a, &(&x0 + &s.h)) - &base).sign())
            .collect();
        k.case(signs.len() == 8, || format!("{} probes instead of 8", signs.len()));
        for (s, exact) in r.samples.iter().zip(&signs) {
            k.case(s.sign == *exact, || format!("reported sign at h = {} disagrees", s.h));
        }
        let ok = match r.verdict {
            ExtremumVerdict::Min => signs.iter().all(|s| *s == Sign::Positive),
            ExtremumVerdict::Max => signs.iter().all(|s| *s == Sign::Negative),
            ExtremumVerdict::NotExtremum => signs.chunks(2).all(|p| p[0] != p[1]),
        };
        k.case(ok, || format!("verdict {} contradicts signs {signs:?} for f = {f} at {x0}", r.verdict));
        if r.verdict != ExtremumVerdict::NotExtremum {
            let df = f.derivative();
            k.case(df.eval(&x0).unwrap().0.is_zero(), || format!("f'({x0}) != 0 at an extremum"));
        }
    }
    k
}

fn a6(rng: &mut ChaCha8Rng) -> Check {
    let mut k = Check::new();
    for _ in 0..20 {
        let terms = rng.random_range(1..=4);
        let mut coeffs = vec![FieldElem::zero()];
        for n in 0..terms {
            coeffs.push(laurent_monomial(rng, 2).abs().scale(&q(1, n + 1)));
        }
        let a = if rng.random_bool(0.5) { FieldElem::zero() } else { laurent_monomial(rng, 2).abs() };
        let b = &a + &laurent_monomial(rng, 2).abs();
        let f = series(coeffs.clone());
        match monotone_certificate(&f, &a, &b) {
            Ok(MonotoneOutcome::Certificate(cert)) => {
                k.case(cert.endpoint_sign == Sign::Positive, || "endpoint sign not positive".into());
            }
            other => k.case(false, || format!("no certificate for f = {f} on [{a}, {b}]: {other:?}")),
        }
        k.case(horner(&coeffs, &a) < horner(&coeffs, &b), || format!("f(a) >= f(b) for f = {f}"));
    }
    let f = series(cubic());
    match monotone_certificate(&f, &c(1), &x(1).powu(2)) {
        Ok(MonotoneOutcome::HypothesisNotVerified { witness, derivative }) => {
            let exact = horner(f.derivative().coeffs(), &witness);
            k.case(exact == derivative && exact.sign() != Sign::Positive, || {
                format!("witness {witness} has f' = {exact}")
            });
        }
        other => k.case(false, || format!("cubic on [1, X1^2]: {other:?}")),
    }
    k
}

fn a7() -> Check {
    let mut k = Check::new();
    let a = cubic();
    let f = |z: &FieldElem| horner(&a, z);
    let inner = |z: &FieldElem| &(&(z * z) * &FieldElem::from_ratio(1, 3)) - &x(1);
    // X1 <= z1 <= z2: f(z1) <= z1(z2^2/3 - X1) <= f(z2)
    let (z1, z2) = (x(1), x(1).powu(2));
    let mid = &z1 * &inner(&z2);
    k.case(f(&z1) <= mid && mid <= f(&z2), || "case 1 chain".into());
    // infinitely large but below X1: both brackets nonnegative, f(z1) <= f(z2)
    let (z1, z2) = (x(1).scale(&q(1, 3)), x(1).scale(&q(1, 2)));
    k.case(inner(&z1) >= c(0) && inner(&z2) >= c(0), || "case 2 brackets".into());
    k.case(f(&z1) <= f(&z2), || "case 2 order".into());
    // real-bounded 0 <= z1 <= z2: f(z2) <= -z1(X1 - z2^2/3) and f(z2) <= f(z1)
    let (z1, z2) = (c(1), c(2));
    let mid = &z1 * &inner(&z2);
    k.case(f(&z2) <= mid, || "case 3 first step".into());
    k.case(f(&z2) <= f(&z1), || "case 3 order".into());
    let third = FieldElem::from_ratio(1, 3);
    let factor = &(&(&(&z1 * &z1) + &(&z1 * &z2)) + &(&z2 * &z2)) * &third;
    let factored = &(&z2 - &z1) * &(&factor - &x(1));
    k.case(&f(&z2) - &f(&z1) == factored, || "case 3 factorization".into());
    // real-bounded z1, infinitely large z2: f(z1) <= 0 <= f(z2)
    let (z1, z2) = (c(5), x(1).scale(&q(1, 2)));
    k.case(f(&z1) <= c(0) && c(0) <= f(&z2), || "case 4".into());

    let s = series(a.clone());
    let df = s.derivative();
    let mut probes = monotone_probes(&c(1), &x(1).powu(2));
    probes.push(x(1));
    for z in probes.iter().take(10) {
        k.case(!df.eval(z).unwrap().0.is_zero(), || format!("f'({z}) = 0"));
        match classify_extremum(&s, z) {
            Ok(r) => k.case(r.verdict == ExtremumVerdict::NotExtremum, || format!("{z} classified {}", r.verdict)),
            Err(e) => k.case(false, || format!("classify at {z}: {e}")),
        }
    }
    k
}

fn a8(rng: &mut ChaCha8Rng) -> Check {
    let mut k = Check::new();
    let f = series(vec![c(0), c(1), c(1)]);
    let (g, cert) = picard_invert(&f, &c(0), 8).unwrap();
    let catalan = [1, -1, 2, -5, 14, -42, 132, -429];
    let got: Vec<FieldElem> = (1..=8).map(|n| g.coeff(n)).collect();
    let expected: Vec<FieldElem> = catalan.iter().map(|n| c(*n)).collect();
    k.case(got == expected, || format!("picard coefficients {got:?}"));
    let oracle = series_reversion_oracle(&f, &c(0), 8).unwrap();
    k.case(oracle == expected, || "oracle coefficients".into());
    k.case(cert.residual_is_zero(), || "nonzero residual".into());
    k.case(cert.gamma_contraction_holds(), || "contraction by g1^-1".into());
    k.case(cert.d1_halving_holds(), || {
        let uppers: Vec<String> = cert.steps.iter().map(|s| s.bracket.upper.to_string()).collect();
        format!("d1 upper bounds per step: [{}]", uppers.join(", "))
    });

    let f = series(cubic());
    let oracle = series_reversion_oracle(&f, &c(0), 3).unwrap();
    let (g, _) = picard_invert(&f, &c(0), 3).unwrap();
    let c1 = -&inv_var(1);
    let c3 = FieldElem::monomial(q(-1, 3), &[(1, -4)]);
    k.case(g.coeff(1) == c1 && oracle[0] == c1, || format!("cubic c1 = {}", g.coeff(1)));
    k.case(g.coeff(3) == c3 && oracle[2] == c3, || format!("cubic c3 = {}", g.coeff(3)));

    let centers = [FieldElem::zero(), c(1), inv_var(1)];
    for i in 0..30 {
        let x0 = centers[i % 3].clone();
        let order = rng.random_range(1..=5usize);
        let len = rng.random_range(2..=6);
        let mut b: Vec<FieldElem> = (0..len)
            .map(|_| match rng.random_range(0..3) {
                0 => FieldElem::from_rational(rational(rng)),
                1 => FieldElem::monomial(nonzero_rational(rng), &[(1, if rng.random_bool(0.5) { 1 } else { -1 })]),
                _ => FieldElem::monomial(q(1, 1), &[(2, if rng.random_bool(0.5) { 1 } else { -1 })]),
            })
            .collect();
        if b[1].is_zero() {
            b[1] = c(1);
        }
        let f = series(expand_at_zero(&b, &x0));
        match picard_invert(&f, &x0, order) {
            Ok((g, cert)) => {
                k.case(cert.stabilized_at <= order + 2, || format!("stabilized at {}", cert.stabilized_at));
                let oracle = series_reversion_oracle(&f, &x0, order).unwrap();
                let got: Vec<FieldElem> = (1..=order).map(|n| g.coeff(n)).collect();
                k.case(got == oracle, || format!("picard and oracle differ for f = {f} at {x0}"));
                k.case(cert.residual_is_zero(), || "nonzero residual".into());
                k.case(cert.gamma_contraction_holds(), || "contraction by g1^-1".into());
                k.case(cert.well_defined(), || "iterate leaves the r1 ball".into());
            }
            Err(e) => k.case(false, || format!("inversion of f = {f} at {x0} failed: {e}")),
        }
    }
    k
}

fn a9() -> Check {
    let mut k = Check::new();
    let f = series(vec![c(0), c(1)]);
    let r = GammaVal::generator_pow(3, 10);
    let z = f.unboundedness_witness(&r).unwrap();
    k.case(val(&z) > r, || format!("witness {z} has valuation {}", val(&z)));
    k.case(val(&f.eval(&z).unwrap().0) > r, || "f(witness) not beyond r".into());
    k.case(val(&x(4)) > r, || "X4 is not beyond g3^10".into());
    k
}

fn a10() -> Check {
    let mut k = Check::new();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let corpus = std::fs::read_to_string(dir.join("corpus.txt")).unwrap();
    for line in corpus.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let (kind, text) = line.split_once(" | ").expect("kind | text");
        let ok = match roundtrip(kind.trim(), text) {
            Ok(canon) => roundtrip(kind.trim(), &canon).as_deref() == Ok(canon.as_str()),
            Err(_) => false,
        };
        k.case(ok, || format!("{kind} `{text}` does not round trip"));
    }
    let bin = env!("CARGO_BIN_EXE_kval");
    let run = |args: &[&str]| Command::new(bin).args(args).output().expect("kval runs");

    let out = run(&["val", "(X2+X1)/(X1*X2)"]);
    k.case(out.status.code() == Some(0) && out.stdout == b"g1^-1\n", || "val example".into());

    let out = run(&["invert", "--f", "z+z^2", "--x0", "0", "--order", "5"]);
    let golden = std::fs::read(dir.join("invert_example.txt")).unwrap();
    let first = String::from_utf8_lossy(&out.stdout).lines().next().map(str::to_string);
    k.case(
        out.status.code() == Some(0)
            && first.as_deref() == Some("y - y^2 + 2*y^3 - 5*y^4 + 14*y^5")
            && out.stdout == golden,
        || "invert example".into(),
    );

    let out = run(&["residue", "X1"]);
    k.case(
        out.status.code() == Some(1)
            && out.stdout.is_empty()
            && out.stderr == b"error: domain error: not in local ring: valuation g1 exceeds 1\n",
        || format!("residue example: {}", String::from_utf8_lossy(&out.stderr)),
    );
    k
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b76_616c);
    let secs = Duration::from_secs;
    let results = [
        report("A1", "valuation axioms", secs(10), || a1(&mut rng)),
        report("A2", "order, valuation and metric balls", secs(10), || a2(&mut rng)),
        report("A3", "convergence verdicts", secs(1), a3),
        report("A4", "maximum principle", secs(30), || a4(&mut rng)),
        report("A5", "extremum classifier", secs(30), || a5(&mut rng)),
        report("A6", "monotonicity certificates", secs(10), || a6(&mut rng)),
        report("A7", "cubic example", secs(5), a7),
        report("A8", "local inversion", secs(60), || a8(&mut rng)),
        report("A9", "unboundedness witness", secs(1), a9),
        report("A10", "command line", secs(5), a10),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

