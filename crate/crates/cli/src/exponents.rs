use std::fmt::Write;

use vortlab::exponents::{
    classify_side_by_side, feasibility_scan, format_rational, interpolation_exponents, lambda_sq,
    feasible_set, vorticity_region, Exponent, ExponentTuple, InterpolationWeights, Q,
};

use crate::CliResult;

fn weights_str(w: &InterpolationWeights) -> String {
    format!(
        "(alpha,theta,alpha',theta') = ({},{},{},{})",
        format_rational(&w.alpha),
        format_rational(&w.theta),
        format_rational(&w.alpha_p),
        format_rational(&w.theta_p)
    )
}

/// Exponent tuples `(r, β, r̂, q, q′)` at the natural weights and at every
/// corner of the feasible weight polygon.
pub fn tuple_report(r: Q) -> CliResult<String> {
    let set = feasible_set(r)?;
    let mut out = String::new();
    writeln!(out, "r = {}", format_rational(&r)).unwrap();
    let mut candidates = vec![("natural", InterpolationWeights::natural())];
    candidates.extend(set.vertex_weights().into_iter().map(|w| ("vertex", w)));
    for (label, w) in candidates {
        match ExponentTuple::from_weights(r, &w) {
            Ok(t) => writeln!(
                out,
                "{label:8} (r,beta,r_hat,q,q') = {t}  consistent={}  {}",
                t.is_consistent(),
                weights_str(&w)
            )
            .unwrap(),
            Err(_) => {
                let (_, r_hat) = interpolation_exponents(r, &w)?;
                writeln!(
                    out,
                    "{label:8} r_hat = {} outside (1,3): no Riesz tuple  {}",
                    format_rational(&r_hat),
                    weights_str(&w)
                )
                .unwrap()
            }
        }
    }
    Ok(out)
}

fn set_str(s: &std::collections::BTreeSet<Q>) -> String {
    let items: Vec<String> = s.iter().map(format_rational).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn scan_report(r_grid: &[Q], denom: i64, unconstrained: bool) -> CliResult<String> {
    let rep = feasibility_scan(r_grid, denom, unconstrained)?;
    let mut out = String::new();
    writeln!(out, "denominator bound: {denom}").unwrap();
    for e in &rep.entries {
        write!(
            out,
            "r = {}: {} weight tuples, {} with r_hat in (1,3); beta = {}; chain beta = {}",
            format_rational(&e.r),
            e.tuples,
            e.riesz_admissible,
            set_str(&e.attainable_beta),
            set_str(&e.chain_beta)
        )
        .unwrap();
        if let Some(u) = &e.unconstrained {
            write!(
                out,
                "; unconstrained beta in [{}, {}], attains 0: {}, attains 1/2: {}",
                format_rational(&u.min),
                format_rational(&u.max),
                u.contains_zero,
                u.contains_half
            )
            .unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "attainable beta under the constraints: {}", set_str(&rep.attainable_beta())).unwrap();
    Ok(out)
}

/// With `vorticity`, `second` is the vorticity exponent `r`; otherwise the
/// velocity exponent `q`, reported alongside the Sobolev-paired vorticity
/// class.
pub fn classify_report(s: Exponent, second: Exponent, vorticity: bool) -> String {
    if vorticity {
        let v = s.recip() * 2 + second.recip() * 3;
        format!(
            "vorticity L^{s}(L^{second}): 2/s + 3/r = {} -> {}\n",
            format_rational(&v),
            vorticity_region(s, second)
        )
    } else {
        let both = classify_side_by_side(s, second);
        let mut out = format!(
            "velocity L^{s}(L^{second}): lambda = {} -> {}\n",
            format_rational(&lambda_sq(s, second)),
            both.velocity
        );
        match (both.vorticity_r, both.vorticity) {
            (Some(r), Some(reg)) => writeln!(out, "paired vorticity L^{s}(L^{r}) -> {reg}").unwrap(),
            _ => writeln!(out, "paired vorticity class: none (q < 3/2)").unwrap(),
        }
        out
    }
}
