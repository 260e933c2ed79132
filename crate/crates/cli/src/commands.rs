use serde_json::{json, Value};

use rkbs::config::{ConfigError, SessionConfig};
use rkbs::periodicity::{
    affine_presentation_check, cycline_structure, is_cycline_to_depth, phi_pq, simplicity_report, CyclineCheck,
    PeriodicityError,
};
use rkbs::selfsim::SelfSimilarKGraph;
use rkbs::semigroup::{multiply, right_lcm, Membership, SemigroupElement, SemigroupError};
use rkbs::staralg::hom::{
    bs_nn, bs_to_flip, flip_to_bs, flip_to_square, flip_w, hom_check, lambda_flip, lambda_square, round_trip_check,
    square_f, square_to_flip,
};
use rkbs::staralg::{FormalCombination, StarAlgError, StarAlgebra};

use crate::doc::Document;
use crate::parse;
use crate::CliError;

pub type Result<T> = std::result::Result<T, CliError>;

fn op(e: impl std::fmt::Display) -> CliError {
    CliError::Operation(e.to_string())
}

fn element_json(x: &SemigroupElement) -> Value {
    json!({"normal_form": x.to_string(), "path": x.path.to_string(), "degree": x.path.degree().to_string(), "exp": x.exp.to_string()})
}

fn combination_json(alg: &StarAlgebra, x: &FormalCombination) -> Result<Value> {
    let canonical = alg.canonical_form(x).map_err(op)?;
    Ok(json!({
        "value": x.to_string(),
        "canonical": canonical.to_string(),
        "terms": x.len(),
    }))
}

pub fn validate(cfg: &SessionConfig) -> Result<Document> {
    match cfg.build() {
        Ok(ss) => {
            let orbits: Vec<Value> = ss
                .orbits()
                .iter()
                .map(|o| json!({"colour": o.color + 1, "edges": o.edges, "restriction_sum": o.sum.to_string()}))
                .collect();
            Ok(Document::ok(json!({
                "instance": ss.label(),
                "valid": true,
                "rank": ss.rank(),
                "sizes": ss.graph().sizes(),
                "division_theta": ss.graph().is_division(),
                "pseudo_free": ss.is_pseudo_free().holds(),
                "checked_to": {"depth": cfg.depth, "g_bound": cfg.g_bound},
                "orbits": orbits,
            })))
        }
        Err(e @ (ConfigError::Graph(_) | ConfigError::Action(_))) => Ok(Document::verdict(
            json!({"valid": false, "reason": e.to_string()}),
            false,
        )),
        Err(e) => Err(e.into()),
    }
}

pub fn nf(ss: &SelfSimilarKGraph, word: &str) -> Result<Document> {
    let x = parse::element(ss, word)?;
    let member = Membership::new(ss).contains(&x);
    let mut v = element_json(&x);
    v["instance"] = json!(ss.label());
    v["input"] = json!(word);
    v["in_positive_semigroup"] = json!(member);
    Ok(Document::ok(v))
}

pub fn mul(ss: &SelfSimilarKGraph, x: &str, y: &str) -> Result<Document> {
    let (a, b) = (parse::element(ss, x)?, parse::element(ss, y)?);
    let p = multiply(ss, &a, &b);
    Ok(Document::ok(json!({
        "instance": ss.label(),
        "x": a.to_string(),
        "y": b.to_string(),
        "product": element_json(&p),
    })))
}

pub fn lcm(ss: &SelfSimilarKGraph, x: &str, y: &str) -> Result<Document> {
    let (a, b) = (parse::element(ss, x)?, parse::element(ss, y)?);
    let base = json!({"instance": ss.label(), "x": a.to_string(), "y": b.to_string()});
    let mut v = base;
    match right_lcm(ss, &a, &b) {
        Ok(Some(l)) => {
            v["lcm"] = element_json(&l);
            Ok(Document::ok(v))
        }
        Ok(None) => {
            v["lcm"] = Value::Null;
            v["reason"] = json!("xS ∩ yS is empty");
            Ok(Document::ok(v))
        }
        Err(e @ SemigroupError::NotPrincipal { .. }) => {
            v["lcm"] = Value::Null;
            v["reason"] = json!(e.to_string());
            Ok(Document::verdict(v, false))
        }
        Err(e) => Err(op(e)),
    }
}

pub fn act(ss: &SelfSimilarKGraph, g: &str, path: &str) -> Result<Document> {
    let g = parse::exponent(g)?;
    let p = parse::path(ss.graph(), path)?;
    let (q, r) = ss.act_restrict(&g, &p);
    Ok(Document::ok(json!({
        "instance": ss.label(),
        "g": g.to_string(),
        "path": p.to_string(),
        "action": q.to_string(),
        "restriction": r.to_string(),
    })))
}

pub fn report(ss: &SelfSimilarKGraph) -> Result<Document> {
    let r = simplicity_report(ss).map_err(op)?;
    Ok(Document::ok(serde_json::to_value(r).expect("report serializes")))
}

pub fn cycline(ss: &SelfSimilarKGraph, mu: &str, g: &str, nu: &str, depth: u32, seed: u64) -> Result<Document> {
    let graph = ss.graph();
    let (mu, g, nu) = (parse::path(graph, mu)?, parse::exponent(g)?, parse::path(graph, nu)?);
    let structure = cycline_structure(ss).ok();
    let predicted = structure.as_ref().map(|s| s.contains(ss, &mu, &g, &nu));
    let check = is_cycline_to_depth(ss, &mu, &g, &nu, depth, 500, seed);
    let (holds, samples, witness) = match &check {
        CyclineCheck::HoldsToDepth { samples, .. } => (true, *samples, None),
        CyclineCheck::Falsified { word } => (false, None, Some(word.to_string())),
    };
    // Only a refuted structural "yes" is a contradiction; a "no" can outlive any finite depth.
    let agree = predicted.is_none_or(|p| !p || holds);
    let v = json!({
        "instance": ss.label(),
        "triple": {"mu": mu.to_string(), "g": g.to_string(), "nu": nu.to_string()},
        "structure": structure.as_ref().map(|s| s.to_string()),
        "structural_verdict": predicted,
        "depth_check": {"depth": depth, "holds": holds, "samples": samples, "witness": witness},
        "agree": agree,
    });
    Ok(Document::verdict(v, predicted.unwrap_or(holds) && agree))
}

pub fn center(ss: &SelfSimilarKGraph, p: &str, q: &str) -> Result<Document> {
    let k = ss.rank();
    let (p, q) = (parse::degree(k, p)?, parse::degree(k, q)?);
    match phi_pq(ss, &p, &q) {
        Ok(table) => {
            let pairs: Vec<Value> = table
                .forward
                .iter()
                .map(|(mu, nu)| json!([mu.to_string(), nu.to_string()]))
                .collect();
            let n = pairs.len();
            Ok(Document::ok(json!({
                "instance": ss.label(),
                "p": p.to_string(),
                "q": q.to_string(),
                "phi": pairs,
                "uv_pairs_checked": n * n,
            })))
        }
        Err(e @ (PeriodicityError::DegreesNotEquivalent { .. } | PeriodicityError::RelationFailed(_))) => Ok(
            Document::verdict(json!({"p": p.to_string(), "q": q.to_string(), "reason": e.to_string()}), false),
        ),
        Err(e) => Err(op(e)),
    }
}

pub fn furstenberg(p: usize, q: usize) -> Result<Document> {
    match affine_presentation_check(p, q) {
        Ok(r) => {
            let pairs: Vec<String> = r
                .pairs
                .iter()
                .map(|((k, l), (k2, l2))| format!("e{k} f{l} = f{l2} e{k2}  ({k} + {l}·{p} = {l2} + {k2}·{q})"))
                .collect();
            Ok(Document::ok(json!({
                "p": p,
                "q": q,
                "relations_checked": r.relations_checked,
                "digit_relations": pairs,
            })))
        }
        Err(e) => Ok(Document::verdict(json!({"p": p, "q": q, "reason": e.to_string()}), false)),
    }
}

fn algebra(ss: &SelfSimilarKGraph) -> Result<StarAlgebra> {
    StarAlgebra::new(ss.clone()).map_err(op)
}

fn expr(alg: &StarAlgebra, input: &str) -> Result<FormalCombination> {
    parse::expression(alg, input).map_err(|e| match e {
        parse::ExprError::Parse(p) => CliError::Parse(p),
        parse::ExprError::Algebra(a) => op(a),
    })
}

pub fn star_eval(ss: &SelfSimilarKGraph, input: &str) -> Result<Document> {
    let alg = algebra(ss)?;
    let x = expr(&alg, input)?;
    let mut v = combination_json(&alg, &x)?;
    v["instance"] = json!(ss.label());
    v["input"] = json!(input);
    Ok(Document::ok(v))
}

pub fn star_mul(ss: &SelfSimilarKGraph, a: &str, b: &str) -> Result<Document> {
    let alg = algebra(ss)?;
    let (x, y) = (expr(&alg, a)?, expr(&alg, b)?);
    let xy = alg.product(&x, &y).map_err(op)?;
    let mut v = combination_json(&alg, &xy)?;
    v["instance"] = json!(ss.label());
    v["x"] = json!(x.to_string());
    v["y"] = json!(y.to_string());
    Ok(Document::ok(v))
}

pub fn star_kms(ss: &SelfSimilarKGraph, a: &str, b: &str) -> Result<Document> {
    let alg = algebra(ss)?;
    let (x, y) = (expr(&alg, a)?, expr(&alg, b)?);
    let lhs = alg.omega(&alg.product(&x, &y).map_err(op)?).map_err(op)?;
    let rhs = alg
        .omega(&alg.product(&y, &alg.sigma(&x).map_err(op)?).map_err(op)?)
        .map_err(op)?;
    let holds = lhs == rhs;
    Ok(Document::verdict(
        json!({
            "instance": ss.label(),
            "x": x.to_string(),
            "y": y.to_string(),
            "omega(xy)": lhs.to_string(),
            "omega(y sigma(x))": rhs.to_string(),
            "holds": holds,
        }),
        holds,
    ))
}

pub fn star_center(ss: &SelfSimilarKGraph, p: &str, q: &str) -> Result<Document> {
    let alg = algebra(ss)?;
    let k = ss.rank();
    let (p, q) = (parse::degree(k, p)?, parse::degree(k, q)?);
    let v = match alg.build_v(&p, &q) {
        Ok(v) => v,
        Err(e @ (StarAlgError::DegreesNotEquivalent { .. } | StarAlgError::Periodicity(_))) => {
            return Ok(Document::verdict(
                json!({"p": p.to_string(), "q": q.to_string(), "reason": e.to_string()}),
                false,
            ))
        }
        Err(e) => return Err(op(e)),
    };
    let unitary = alg.is_unitary(&v).map_err(op)?;
    let central = alg.commutes_with_generators(&v).map_err(op)?;
    Ok(Document::verdict(
        json!({
            "instance": ss.label(),
            "p": p.to_string(),
            "q": q.to_string(),
            "v": v.to_string(),
            "unitary": unitary,
            "central": central,
        }),
        unitary && central,
    ))
}

/// Built-in isomorphism checks between the trivial-action 2-graphs and `E(n,n)`.
pub fn star_hom(pair: &str, n: usize) -> Result<Document> {
    let outcome = match pair {
        "flip-bs" => flip_bs(n),
        "square-flip" => square_flip(),
        other => {
            return Err(CliError::Usage(format!(
                "unknown map pair {other:?}; expected flip-bs or square-flip"
            )))
        }
    };
    match outcome {
        Ok(v) => Ok(Document::ok(v)),
        Err(e @ StarAlgError::RelationFailed { .. }) => {
            Ok(Document::verdict(json!({"pair": pair, "passed": false, "reason": e.to_string()}), false))
        }
        Err(e) => Err(op(e)),
    }
}

fn flip_bs(n: usize) -> std::result::Result<Value, StarAlgError> {
    if n < 2 {
        return Err(StarAlgError::RelationFailed {
            relation: "setup".into(),
            witness: format!("n = {n} needs n ≥ 2"),
        });
    }
    let flip = lambda_flip(n)?;
    let bs = bs_nn(n)?;
    let pi = flip_to_bs(n, &bs)?;
    let rho = bs_to_flip(n, &flip)?;
    let forward = hom_check(&flip, &bs, &pi)?;
    let backward = hom_check(&bs, &flip, &rho)?;
    let rt_flip = round_trip_check(&flip, &bs, &pi, &rho)?;
    let rt_bs = round_trip_check(&bs, &flip, &rho, &pi)?;
    Ok(json!({
        "pair": "flip-bs",
        "n": n,
        "pi_relations": forward.relations_checked,
        "rho_relations": backward.relations_checked,
        "round_trip_generators": rt_flip + rt_bs,
        "passed": true,
    }))
}

fn square_flip() -> std::result::Result<Value, StarAlgError> {
    let flip = lambda_flip(2)?;
    let square = lambda_square()?;
    let w = flip_w(&flip);
    let f = square_f(&square);
    let w2 = flip.product(&w, &w)?;
    let s = |c, l| flip.s_edge(rkbs::kgraph::Edge::new(c, l));
    let expected = flip
        .product(&s(1, 0)?, &s(0, 0)?.adjoint())?
        .add(&flip.product(&s(1, 1)?, &s(0, 1)?.adjoint())?);
    if !flip.canonical_eq(&w2, &expected)? {
        return Err(StarAlgError::RelationFailed {
            relation: "W² = s_f0 s_e0* + s_f1 s_e1*".into(),
            witness: w2.to_string(),
        });
    }
    let pi = square_to_flip(&flip)?;
    let rho = flip_to_square(&square)?;
    let forward = hom_check(&square, &flip, &pi)?;
    let backward = hom_check(&flip, &square, &rho)?;
    let rho_w = rkbs::staralg::hom::apply_hom(&square, &rho, &w)?;
    if !square.canonical_eq(&rho_w, &f)? {
        return Err(StarAlgError::RelationFailed {
            relation: "ρ(W) = F".into(),
            witness: rho_w.to_string(),
        });
    }
    let rt = round_trip_check(&square, &flip, &pi, &rho)? + round_trip_check(&flip, &square, &rho, &pi)?;
    Ok(json!({
        "pair": "square-flip",
        "w_squared": w2.to_string(),
        "pi_relations": forward.relations_checked,
        "rho_relations": backward.relations_checked,
        "rho_of_w_is_f": true,
        "round_trip_generators": rt,
        "passed": true,
    }))
}
