use clap::ValueEnum;
use serde_json::{json, Value};

use esforge_core::{
    AdmissibleDomain, CrossCheckReport, DensityReport, FactorCheck, ProgressionSpec, Solution,
    Triple, VerificationReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

fn line(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn solution(s: &Solution, format: Format) -> String {
    match format {
        Format::Json => line(s),
        Format::Csv => format!(
            "k,n,x,y,z,method,t,m\n{},{},{},{},{},{},{},{}\n",
            s.k,
            s.n,
            s.x,
            s.y,
            s.z,
            s.method,
            opt(s.t),
            opt(s.m)
        ),
        Format::Text => {
            let mut out = format!(
                "{}/{} = 1/{} + 1/{} + 1/{}  [{}",
                s.k, s.n, s.x, s.y, s.z, s.method
            );
            if let (Some(t), Some(m)) = (s.t, s.m) {
                out += &format!(", t={t}, m={m}");
            }
            out + "]\n"
        }
    }
}

pub fn report(r: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => r.to_json(),
        Format::Csv => r.to_csv(),
        Format::Text => {
            let mut out = format!("k={} range=[{}, {})\n", r.k, r.lo, r.hi);
            for (tag, c) in &r.per_method_counts {
                out += &format!("  {tag:<17} {c}\n");
            }
            out += &format!("  exceptions        {}\n", r.exceptions.len());
            out += &format!("  failures          {}\n", r.failures.len());
            for f in &r.failures {
                out += &format!("    n={}: {}\n", f.n, f.reason);
            }
            out
        }
    }
}

pub fn domain(
    k: u64,
    x: u64,
    t: u64,
    n1: u64,
    d: Option<&AdmissibleDomain>,
    format: Format,
) -> String {
    match (format, d) {
        (Format::Json, Some(d)) => {
            let mut v = serde_json::to_value(d).expect("serializable");
            v["empty"] = Value::Bool(false);
            line(&v)
        }
        (Format::Json, None) => line(&json!({
            "k": k.to_string(), "x": x.to_string(), "t": t.to_string(),
            "n1": n1.to_string(), "empty": true,
        })),
        (Format::Csv, Some(d)) => format!(
            "k,x,t,n1,n_min,n_max,f_at_min,f_at_max\n{k},{x},{t},{n1},{},{},{},{}\n",
            d.n_min, d.n_max, d.f_at_min, d.f_at_max
        ),
        (Format::Csv, None) => {
            format!("k,x,t,n1,n_min,n_max,f_at_min,f_at_max\n{k},{x},{t},{n1},,,,\n")
        }
        (Format::Text, Some(d)) => format!(
            "[{}, {}] with F from {} down to {}\n",
            d.n_min, d.n_max, d.f_at_min, d.f_at_max
        ),
        (Format::Text, None) => format!("empty (no n ≥ {n1} admissible for k={k}, x={x}, t={t})\n"),
    }
}

pub fn triples(k: u64, n: u64, list: &[Triple], format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<[String; 3]> = list
                .iter()
                .map(|(x, y, z)| [x.to_string(), y.to_string(), z.to_string()])
                .collect();
            line(&json!({ "k": k.to_string(), "n": n.to_string(), "triples": rows }))
        }
        Format::Csv => {
            let mut out = String::from("x,y,z\n");
            for (x, y, z) in list {
                out += &format!("{x},{y},{z}\n");
            }
            out
        }
        Format::Text => {
            let mut out = format!("{} decompositions of {k}/{n}\n", list.len());
            for (x, y, z) in list {
                out += &format!("  1/{x} + 1/{y} + 1/{z}\n");
            }
            out
        }
    }
}

pub fn crosscheck(r: &CrossCheckReport, format: Format) -> String {
    match format {
        Format::Json => line(r),
        Format::Csv => format!(
            "k,n,oracle_triples,rotations_checked,integral_t,non_integral_t,search_found,agreement_asserted\n{},{},{},{},{},{},{},{}\n",
            r.k, r.n, r.oracle_triples, r.rotations_checked, r.integral_t, r.non_integral_t,
            r.search_found, r.agreement_asserted
        ),
        Format::Text => format!(
            "k={} n={}: {} triples, {} integral-t rotations, {} non-integral, search {}\n",
            r.k,
            r.n,
            r.oracle_triples,
            r.integral_t,
            r.non_integral_t,
            if r.search_found { "found" } else { "exhausted" }
        ),
    }
}

pub fn density(r: &DensityReport, format: Format) -> String {
    match format {
        Format::Json => line(r),
        Format::Csv => r.to_csv(),
        Format::Text => {
            let mut out = format!("{:>14} {:>12} {:>16}\n", "x", "B(x)", "B(x)/x");
            for ((x, b), q) in r.checkpoints.iter().zip(&r.b_counts).zip(&r.ratios) {
                out += &format!("{x:>14} {b:>12} {q:>16}\n");
            }
            out + "(B counts include n = 1)\n"
        }
    }
}

pub fn progression(p: &ProgressionSpec, format: Format) -> String {
    match format {
        Format::Json => line(p),
        Format::Csv => format!(
            "b,base_modulus,base_residue,step_residue,result_modulus,result_residue\n{},{},{},{},{},{}\n",
            p.b, p.base_modulus, p.base_residue, p.step_residue, p.result_modulus, p.result_residue
        ),
        Format::Text => format!(
            "j ≡ {} (mod {}), n ≡ {} (mod {})\n",
            p.step_residue, p.b, p.result_residue, p.result_modulus
        ),
    }
}

pub fn euler(
    s: f64,
    limit: u64,
    p: f64,
    recip: f64,
    check: Option<&FactorCheck>,
    format: Format,
) -> String {
    match format {
        Format::Json => {
            let mut v = json!({
                "s": s.to_string(),
                "prime_limit": limit.to_string(),
                "p": p.to_string(),
                "reciprocal_sum_3mod4": recip.to_string(),
            });
            if let Some(c) = check {
                v["lhs"] = json!(c.lhs.to_string());
                v["rhs"] = json!(c.rhs.to_string());
                v["rel_err"] = json!(c.rel_err.to_string());
            }
            line(&v)
        }
        Format::Csv => {
            let (l, r, e) = check.map_or((String::new(), String::new(), String::new()), |c| {
                (c.lhs.to_string(), c.rhs.to_string(), c.rel_err.to_string())
            });
            format!("s,prime_limit,p,reciprocal_sum_3mod4,lhs,rhs,rel_err\n{s},{limit},{p},{recip},{l},{r},{e}\n")
        }
        Format::Text => {
            let mut out = format!("P({s}) over p ≤ {limit}: {p}\nΣ 1/p (p ≡ 3 mod 4): {recip}\n");
            if let Some(c) = check {
                out += &format!(
                    "D(s) = {} vs ζ(s)(1−2^−s)P(s) = {} (rel err {:e})\n",
                    c.lhs, c.rhs, c.rel_err
                );
            }
            out
        }
    }
}
