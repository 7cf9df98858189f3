use std::fmt::Write as _;

use num_rational::BigRational;
use qtfock::combin::{joint_cross_nest_polynomial, perm_inv_div_polynomial, qt_factorial};
use qtfock::fock::{
    inner_product, n_star, n_star_scan, operator_norm, theoretical_norm, FockParams, FockTruncation, FockVector,
    NormCase,
};
use qtfock::moments::{dyck_moments, t_catalan, touchard_riordan, traciality_gap, Covariance, MomentSequence};
use qtfock::orthopoly::{
    cauchy_transform, functional_gram, qt_hermite, support_bound, t_airy, t_airy_derivative, t_airy_lifted,
    t_airy_zeros, t_chebyshev, t_semicircular_measure, t_semicircular_measure_adaptive, PolySeq,
};
use qtfock::scalar::{Real, Scalar};
use qtfock::wigner::{monte_carlo, EntryLaw, WignerConfig};
use qtfock::{BivarPoly, Error, Guards, Result};
use serde_json::{json, Value};

use crate::emit::{bigint_json, param, render, required, Emit, Param};
use crate::{Entries, Mode, Opts};

type Complex = qtfock::orthopoly::Complex<f64>;

fn order(positional: Option<usize>, opts: &Opts, name: &str) -> Result<usize> {
    positional
        .or(opts.n)
        .ok_or_else(|| Error::Invalid(format!("{name} needs n (positional or --n)")))
}

fn poly_output(opts: &Opts, schema: &str, n: usize, p: &BivarPoly) -> Result<String> {
    let mut body = serde_json::to_value(p).expect("polynomials serialize");
    body["n"] = json!(n);
    body["polynomial"] = Value::String(p.to_string());
    let mut csv = String::from("q,t,c\n");
    for ((a, b), c) in p.graded_terms() {
        let _ = writeln!(csv, "{a},{b},{c}");
    }
    render(opts.output, schema, body, Some(csv))
}

pub fn genpoly(opts: &Opts, n: Option<usize>, guards: &Guards) -> Result<String> {
    let n = order(n, opts, "genpoly")?;
    poly_output(opts, "genpoly", n, &joint_cross_nest_polynomial(n, guards)?)
}

pub fn permpoly(opts: &Opts, n: Option<usize>, guards: &Guards) -> Result<String> {
    let n = order(n, opts, "permpoly")?;
    poly_output(opts, "permpoly", n, &perm_inv_div_polynomial(n, guards)?)
}

/// `0 < t <= 1` and `|q| <= t`.
fn check_qt<R: Real>(q: &R, t: &R) -> Result<()> {
    if !t.is_positive() || *t > R::one() || q.abs() > *t {
        return Err(Error::Domain(format!(
            "need |q| <= t with 0 < t <= 1, got q = {}, t = {}",
            q.to_f64(),
            t.to_f64()
        )));
    }
    Ok(())
}

fn qt<R: Param>(opts: &Opts) -> Result<(R, R)> {
    let q = required(param::<R>(&opts.q, "q")?, "q")?;
    let t = required(param::<R>(&opts.t, "t")?, "t")?;
    Ok((q, t))
}

fn symbolic(opts: &Opts) -> bool {
    opts.mode == Mode::Exact && opts.q.is_none() && opts.t.is_none()
}

fn moments_body<R: Emit>(k: usize, q: &R, t: &R) -> (Value, String) {
    let seq = MomentSequence::from_even(&dyck_moments(k, q, t));
    let mut csv = String::from("k,moment\n");
    for (i, m) in seq.values.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", m.text());
    }
    (json!({ "moments": seq.values.iter().map(Emit::json).collect::<Vec<_>>() }), csv)
}

pub fn moments(opts: &Opts) -> Result<String> {
    let k = opts.n.unwrap_or(6);
    let (mut body, csv) = if symbolic(opts) {
        let (b, c) = moments_body(k, &BivarPoly::q(), &BivarPoly::t());
        (b, c)
    } else {
        match opts.mode {
            Mode::Exact => {
                let (q, t) = qt::<BigRational>(opts)?;
                check_qt(&q, &t)?;
                with_qt(moments_body(k, &q, &t), &q, &t)
            }
            Mode::Float => {
                let (q, t) = qt::<f64>(opts)?;
                check_qt(&q, &t)?;
                with_qt(moments_body(k, &q, &t), &q, &t)
            }
        }
    };
    if body.get("q").is_none() {
        body["q"] = Value::String("q".into());
        body["t"] = Value::String("t".into());
    }
    render(opts.output, "moments", body, Some(csv))
}

fn with_qt<R: Emit>((mut body, csv): (Value, String), q: &R, t: &R) -> (Value, String) {
    body["q"] = q.json();
    body["t"] = t.json();
    (body, csv)
}

fn gram_impl<R: Param + std::fmt::Display>(opts: &Opts, guards: &Guards) -> Result<String> {
    let (q, t) = qt::<R>(opts)?;
    let params = FockParams::new_relaxed(q.clone(), t.clone(), opts.d, opts.level)?;
    let trunc = FockTruncation::new(params, guards)?;
    let g = trunc.full_gram();
    let labels = trunc.basis().labels();
    let matrix: Vec<Vec<Value>> = (0..g.rows()).map(|i| (0..g.cols()).map(|j| g[(i, j)].json()).collect()).collect();
    let body = json!({
        "q": q.json(), "t": t.json(), "d": opts.d, "level": opts.level,
        "labels": labels, "matrix": matrix,
    });
    render(opts.output, "gram", body, Some(g.to_csv(&labels)))
}

pub fn gram(opts: &Opts, guards: &Guards) -> Result<String> {
    match opts.mode {
        Mode::Exact => gram_impl::<BigRational>(opts, guards),
        Mode::Float => gram_impl::<f64>(opts, guards),
    }
}

fn positivity_impl<R: Param>(opts: &Opts, guards: &Guards) -> Result<String> {
    let (q, t) = qt::<R>(opts)?;
    let params = FockParams::new_relaxed(q.clone(), t.clone(), opts.d, opts.level)?;
    let trunc = FockTruncation::new(params.clone(), guards)?;
    let mut levels = Vec::new();
    let mut csv = String::from("level,min_eigenvalue,max_eigenvalue,positive_definite\n");
    for n in 0..=opts.level {
        let r = trunc.level_gram(n).positivity();
        let _ = writeln!(csv, "{n},{},{},{}", r.min_eigenvalue, r.max_eigenvalue, r.is_positive_definite);
        let mut v = serde_json::to_value(r).expect("reports serialize");
        v["level"] = json!(n);
        levels.push(v);
    }
    let mut body = json!({ "q": q.json(), "t": t.json(), "d": opts.d, "level": opts.level, "levels": levels });
    if opts.d >= 2 && opts.level >= 2 {
        let one = R::one();
        let sym = FockVector::basis(&[0, 1]).with(&[1, 0], one.clone());
        let anti = FockVector::basis(&[0, 1]).with(&[1, 0], -one);
        body["symmetric_norm_sq"] = inner_product(&params, &sym, &sym)?.json();
        body["antisymmetric_norm_sq"] = inner_product(&params, &anti, &anti)?.json();
    }
    render(opts.output, "positivity", body, Some(csv))
}

pub fn positivity(opts: &Opts, guards: &Guards) -> Result<String> {
    match opts.mode {
        Mode::Exact => positivity_impl::<BigRational>(opts, guards),
        Mode::Float => positivity_impl::<f64>(opts, guards),
    }
}

pub fn norm(opts: &Opts, numeric: bool, guards: &Guards) -> Result<String> {
    let (q, t) = qt::<f64>(opts)?;
    let (value, case) = theoretical_norm(q, t, 1.0)?;
    let mut body = json!({ "q": q, "t": t, "norm": value, "case": case.to_string() });
    if case == NormCase::Interior {
        body["n_star"] = json!(n_star(q, t)?);
        body["n_star_scan"] = json!(n_star_scan(q, t)?);
    }
    if numeric {
        let params = FockParams::new(q, t, opts.d, opts.level)?;
        let mut f = vec![0.0; opts.d];
        f[0] = 1.0;
        body["numeric_norm"] = json!(operator_norm(&params, &f, guards)?);
        body["d"] = json!(opts.d);
        body["level"] = json!(opts.level);
    }
    let csv = format!("case,norm\n{case},{value}\n");
    render(opts.output, "norm", body, Some(csv))
}

fn relations_impl<R: Param>(opts: &Opts, guards: &Guards) -> Result<String> {
    let (q, t) = qt::<R>(opts)?;
    let trunc = FockTruncation::new(FockParams::new(q.clone(), t.clone(), opts.d, opts.level)?, guards)?;
    let adjoint = trunc.check_adjoint()?;
    let commutation = trunc.check_commutation_all()?;
    let csv = format!("relation,residual\nadjoint,{}\ncommutation,{}\n", adjoint.text(), commutation.text());
    let body = json!({
        "q": q.json(), "t": t.json(), "d": opts.d, "level": opts.level,
        "adjoint_residual": adjoint.json(), "commutation_residual": commutation.json(),
    });
    render(opts.output, "check-relations", body, Some(csv))
}

pub fn check_relations(opts: &Opts, guards: &Guards) -> Result<String> {
    match opts.mode {
        Mode::Exact => relations_impl::<BigRational>(opts, guards),
        Mode::Float => relations_impl::<f64>(opts, guards),
    }
}

fn polyseq_output<R: Emit>(opts: &Opts, schema: &str, seq: &PolySeq<R>, params: Value) -> Result<String> {
    let polys: Vec<Vec<Value>> = seq.polys().iter().map(|p| p.iter().map(Emit::json).collect()).collect();
    let mut csv = String::from("n,power,coefficient\n");
    for (n, p) in seq.polys().iter().enumerate() {
        for (k, c) in p.iter().enumerate() {
            let _ = writeln!(csv, "{n},{k},{}", c.text());
        }
    }
    let mut body = params;
    body["polynomials"] = json!(polys);
    render(opts.output, schema, body, Some(csv))
}

pub fn hermite(opts: &Opts, chebyshev: bool) -> Result<String> {
    let k = opts.n.unwrap_or(5);
    let schema = if chebyshev { "chebyshev" } else { "hermite" };
    let exact_t = |opts: &Opts| -> Result<Option<BigRational>> { param::<BigRational>(&opts.t, "t") };
    match (opts.mode, chebyshev) {
        (Mode::Exact, true) => match exact_t(opts)? {
            None => polyseq_output(opts, schema, &t_chebyshev(k, &BivarPoly::t()), json!({"t": "t"})),
            Some(t) => polyseq_output(opts, schema, &t_chebyshev(k, &t), json!({"t": t.json()})),
        },
        (Mode::Float, true) => {
            let t = required(param::<f64>(&opts.t, "t")?, "t")?;
            polyseq_output(opts, schema, &t_chebyshev(k, &t), json!({"t": t}))
        }
        (Mode::Exact, false) if symbolic(opts) => polyseq_output(
            opts,
            schema,
            &qt_hermite(k, &BivarPoly::q(), &BivarPoly::t()),
            json!({"q": "q", "t": "t"}),
        ),
        (Mode::Exact, false) => {
            let (q, t) = qt::<BigRational>(opts)?;
            polyseq_output(opts, schema, &qt_hermite(k, &q, &t), json!({"q": q.json(), "t": t.json()}))
        }
        (Mode::Float, false) => {
            let (q, t) = qt::<f64>(opts)?;
            polyseq_output(opts, schema, &qt_hermite(k, &q, &t), json!({"q": q, "t": t}))
        }
    }
}

fn orthocheck_impl<R: Emit>(opts: &Opts, k: usize, q: &R, t: &R, labels: (Value, Value)) -> Result<String> {
    let seq = qt_hermite(k, q, t);
    let moments = MomentSequence::from_even(&dyck_moments(k, q, t));
    let g = functional_gram(&seq, &moments)?;
    let mut exact_zero = true;
    let mut max_off: Option<f64> = Some(0.0);
    for m in 0..=k {
        for n in 0..=k {
            if m == n {
                continue;
            }
            exact_zero &= g[(m, n)].is_zero();
            max_off = match (max_off, g[(m, n)].magnitude()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
    }
    let mut norms = Vec::new();
    let mut norms_match = true;
    for n in 0..=k {
        let expect = qt_factorial(n as u32, q, t);
        norms_match &= g[(n, n)].matches(&expect);
        norms.push(g[(n, n)].json());
    }
    let csv = format!(
        "k,offdiagonal_exact_zero,max_offdiagonal,norms_match\n{k},{exact_zero},{},{norms_match}\n",
        max_off.map(|v| v.to_string()).unwrap_or_default()
    );
    let body = json!({
        "q": labels.0, "t": labels.1, "k": k,
        "offdiagonal_exact_zero": exact_zero, "max_offdiagonal": max_off,
        "squared_norms": norms, "norms_match": norms_match,
    });
    render(opts.output, "orthocheck", body, Some(csv))
}

pub fn orthocheck(opts: &Opts) -> Result<String> {
    let k = opts.n.unwrap_or(8);
    if symbolic(opts) {
        return orthocheck_impl(opts, k, &BivarPoly::q(), &BivarPoly::t(), (json!("q"), json!("t")));
    }
    match opts.mode {
        Mode::Exact => {
            let (q, t) = qt::<BigRational>(opts)?;
            check_qt(&q, &t)?;
            orthocheck_impl(opts, k, &q, &t, (q.json(), t.json()))
        }
        Mode::Float => {
            let (q, t) = qt::<f64>(opts)?;
            check_qt(&q, &t)?;
            orthocheck_impl(opts, k, &q, &t, (q.json(), t.json()))
        }
    }
}

fn coefficient_output(opts: &Opts, schema: &str, n: usize, coeffs: Vec<Value>, p: &BivarPoly, var: &str) -> Result<String> {
    let mut csv = String::from("power,coefficient\n");
    for (i, c) in coeffs.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", c.as_i64().map(|v| v.to_string()).unwrap_or_else(|| c.as_str().unwrap_or("").into()));
    }
    let mut body = json!({ "n": n, "variable": var, "coefficients": coeffs, "polynomial": p.to_string() });
    let value_param = if var == "t" { &opts.t } else { &opts.q };
    if value_param.is_some() {
        let (q0, t_at) = match opts.mode {
            Mode::Exact => {
                let x = required(param::<BigRational>(value_param, var)?, var)?;
                let zero = BigRational::from_i64(0);
                let v = if var == "t" { p.eval(&zero, &x) } else { p.eval(&x, &BigRational::from_i64(1)) };
                (x.json(), v.json())
            }
            Mode::Float => {
                let x = required(param::<f64>(value_param, var)?, var)?;
                let v = if var == "t" { p.eval(&0.0, &x) } else { p.eval(&x, &1.0) };
                (json!(x), json!(v))
            }
        };
        body[var] = q0;
        body["value"] = t_at;
    }
    render(opts.output, schema, body, Some(csv))
}

pub fn tcatalan(opts: &Opts, n: Option<usize>) -> Result<String> {
    let n = order(n, opts, "tcatalan")?;
    let p = t_catalan(n);
    let coeffs = (0..=p.t_degree()).map(|k| bigint_json(&p.coeff(0, k))).collect();
    coefficient_output(opts, "tcatalan", n, coeffs, &p, "t")
}

pub fn touchard(opts: &Opts, n: Option<usize>) -> Result<String> {
    let n = order(n, opts, "touchard")?;
    let p = touchard_riordan(n)?;
    let coeffs = (0..=p.q_degree()).map(|k| bigint_json(&p.coeff(k, 0))).collect();
    coefficient_output(opts, "touchard", n, coeffs, &p, "q")
}

fn float_t(opts: &Opts) -> Result<f64> {
    required(param::<f64>(&opts.t, "t")?, "t")
}

pub fn airy(opts: &Opts, z: f64) -> Result<String> {
    let t = float_t(opts)?;
    let tol = opts.tol.unwrap_or(1e-12);
    let body = match (t_airy(z, t, tol), t_airy_derivative(z, t, tol)) {
        (Ok(a), Ok(d)) => json!({
            "z": z, "t": t, "method": "direct", "value": a.value, "derivative": d.value,
            "error_bound": a.error_bound, "derivative_error_bound": d.error_bound, "terms": a.terms,
        }),
        _ => {
            let l = t_airy_lifted(z, t)?;
            json!({
                "z": z, "t": t, "method": "lifted",
                "value": l.unscaled_value(), "derivative": l.unscaled_derivative(),
                "error_bound": Value::Null,
            })
        }
    };
    let csv = format!("z,t,value,derivative\n{z},{t},{},{}\n", body["value"], body["derivative"]);
    render(opts.output, "airy", body, Some(csv))
}

pub fn zeros(opts: &Opts) -> Result<String> {
    let t = float_t(opts)?;
    let count = opts.count.unwrap_or(5);
    let z = t_airy_zeros(t, count)?;
    let mut csv = String::from("j,zero\n");
    for (j, v) in z.iter().enumerate() {
        let _ = writeln!(csv, "{},{v}", j + 1);
    }
    render(opts.output, "zeros", json!({ "t": t, "count": count, "zeros": z }), Some(csv))
}

pub fn measure(opts: &Opts) -> Result<String> {
    let t = float_t(opts)?;
    let m = match opts.count {
        Some(c) => t_semicircular_measure(t, c)?,
        None => t_semicircular_measure_adaptive(t, opts.tol.unwrap_or(1e-10), 2000)?,
    };
    let atoms: Vec<Value> = m.atoms.iter().map(|(x, w)| json!({ "location": x, "mass": w })).collect();
    let bound = support_bound(t);
    let body = json!({
        "t": t, "atoms": atoms, "total_mass": m.total_mass(), "mass_defect": m.mass_defect(),
        "support_bound": bound, "within_support_bound": m.max_abs_location() <= bound,
    });
    render(opts.output, "measure", body, Some(m.to_csv()))
}

fn parse_points(s: &str) -> Result<Vec<Complex>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let bad = || Error::Invalid(format!("cannot parse point {p:?}; expected re,im"));
            let (re, im) = p.split_once(',').ok_or_else(bad)?;
            Ok(Complex::new(
                re.trim().parse().map_err(|_| bad())?,
                im.trim().parse().map_err(|_| bad())?,
            ))
        })
        .collect()
}

pub fn cauchy(opts: &Opts, points: Option<&str>, radius: Option<f64>) -> Result<String> {
    let t = float_t(opts)?;
    let grid = match points {
        Some(s) => parse_points(s)?,
        None => {
            let r = radius.unwrap_or(1.25 * support_bound(t));
            let count = opts.count.unwrap_or(16);
            (0..count)
                .map(|k| Complex::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / count as f64))
                .collect()
        }
    };
    let mut rows = Vec::new();
    let mut csv = String::from("re,im,g_re,g_im\n");
    for z in grid {
        let g = cauchy_transform(z, t)?;
        let _ = writeln!(csv, "{},{},{},{}", z.re, z.im, g.re, g.im);
        rows.push(json!({ "re": z.re, "im": z.im, "g_re": g.re, "g_im": g.im }));
    }
    render(opts.output, "cauchy", json!({ "t": t, "values": rows }), Some(csv))
}

pub fn wigner(opts: &Opts, entries: Entries) -> Result<String> {
    let rho = required(opts.rho, "rho")?;
    let law = match entries {
        Entries::Gaussian => EntryLaw::Gaussian,
        Entries::Rademacher => EntryLaw::Rademacher,
    };
    let cfg = WignerConfig::new(opts.size, rho, opts.n.unwrap_or(4), opts.trials, opts.seed)?.with_entries(law);
    let r = monte_carlo(&cfg)?;
    let mut csv = String::from("trial,value\n");
    for (i, v) in r.per_trial.iter().enumerate() {
        let _ = writeln!(csv, "{i},{v}");
    }
    let body = json!({
        "config": r.config, "estimate": r.estimate.mean, "std_error": r.estimate.std_error,
        "trials": r.estimate.trials, "prediction": r.prediction, "z_score": r.z_score,
    });
    render(opts.output, "wigner", body, Some(csv))
}

fn trace_gap_impl<R: Param>(opts: &Opts) -> Result<String> {
    let (q, t) = qt::<R>(opts)?;
    let (e1, e2) = (vec![R::one(), R::zero()], vec![R::zero(), R::one()]);
    let family = [e1.clone(), e1, e2.clone(), e2];
    let cov = Covariance::from_vectors(&family)?;
    let (forward, rotated) = traciality_gap(&q, &t, &cov)?;
    let trunc = FockTruncation::new(FockParams::new_relaxed(q.clone(), t.clone(), 2, 4)?, &Guards::default())?;
    let fock_forward = trunc.field_moment(&family)?;
    let rotated_family = [family[3].clone(), family[0].clone(), family[1].clone(), family[2].clone()];
    let fock_rotated = trunc.field_moment(&rotated_family)?;
    let gap = forward.clone() - rotated.clone();
    let csv = format!("forward,rotated,gap\n{},{},{}\n", forward.text(), rotated.text(), gap.text());
    let body = json!({
        "q": q.json(), "t": t.json(),
        "forward": forward.json(), "rotated": rotated.json(), "gap": gap.json(),
        "fock_forward": fock_forward.json(), "fock_rotated": fock_rotated.json(),
    });
    render(opts.output, "trace-gap", body, Some(csv))
}

pub fn trace_gap(opts: &Opts) -> Result<String> {
    match opts.mode {
        Mode::Exact => trace_gap_impl::<BigRational>(opts),
        Mode::Float => trace_gap_impl::<f64>(opts),
    }
}
