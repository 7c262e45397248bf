//! Command dispatcher, JSON I/O, and SVG rendering of planar tropical
//! complexes.
//!
//! Every command reads flags of the form `--name value`, writes a JSON
//! document to the result, and maps each error class to a distinct exit
//! code (see [`exit_code`]). Output is deterministic: object keys are
//! sorted, cells are sorted by dimension and canonical vertex list, and
//! all numbers are exact rationals rendered `p/q` (a `--float` flag adds
//! decimal approximations alongside).

use crate::arith::{rat_from_str, rat_to_f64, rat_to_string, Gaussian, Rat};
use crate::charts::{Chart, ChartError};
use crate::complex::{cell_shape, PolyhedralComplex, WeightedComplex};
use crate::cone::{Cone, ConeError};
use crate::convex::Fan;
use crate::geometry::{
    explode_ncd, explode_toric, make_family, pants_census, refine, tropical_fiber_product,
    AffineMap, NCConfiguration, OpsError,
};
use crate::lattice::{IntMatrix, LatticeError};
use crate::parse::{parse_coefficient, parse_point, parse_polynomial, print_polynomial, ParseError};
use crate::polytope::{AffinePolytope, PolytopeError, PolytopeJson};
use crate::semiring::SemiringError;
use crate::strata::{
    delta_i, e_s, seminorm_estimate, verify_delta_bound, CPoly, Region, StrataError, TestFunction,
};
use crate::troppoly::{corner_locus, is_balanced, PolyError};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Semiring(#[from] SemiringError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("invalid JSON input: {0}")]
    Json(String),
    #[error("SVG output requires a two-dimensional complex")]
    NotTwoDimensional,
}

/// Stable exit codes, one per error class.
pub fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::Usage(_) => 3,
        CliError::Parse(_) => 2,
        CliError::Semiring(_) => 4,
        CliError::Lattice(_) => 5,
        CliError::Polytope(_) => 6,
        CliError::Cone(_) => 7,
        CliError::Chart(_) => 8,
        CliError::Poly(_) => 9,
        CliError::Ops(_) => 10,
        CliError::Strata(_) => 11,
        CliError::Json(_) => 12,
        CliError::NotTwoDimensional => 13,
    }
}

fn error_kind(err: &CliError) -> &'static str {
    match err {
        CliError::Usage(_) => "usage",
        CliError::Parse(_) => "syntax",
        CliError::Semiring(_) => "semiring",
        CliError::Lattice(_) => "lattice",
        CliError::Polytope(_) => "polytope",
        CliError::Cone(_) => "cone",
        CliError::Chart(_) => "chart",
        CliError::Poly(_) => "polynomial",
        CliError::Ops(_) => "geometry",
        CliError::Strata(_) => "strata",
        CliError::Json(_) => "json",
        CliError::NotTwoDimensional => "svg",
    }
}

/// Result of one CLI invocation.
#[derive(Clone, Debug)]
pub struct CommandResult {
    pub status: i32,
    pub json: Value,
    pub svg: Option<String>,
}

struct Args {
    positional: Vec<String>,
    flags: BTreeMap<String, String>,
    bools: Vec<String>,
}

impl Args {
    fn parse(args: &[String]) -> Result<Args, CliError> {
        let mut positional = Vec::new();
        let mut flags = BTreeMap::new();
        let mut bools = Vec::new();
        let mut i = 0;
        while i < args.len() {
            let a = &args[i];
            if let Some(name) = a.strip_prefix("--") {
                if name == "float" {
                    bools.push(name.to_string());
                    i += 1;
                } else {
                    let value = args.get(i + 1).ok_or_else(|| {
                        CliError::Usage(format!("flag --{name} needs a value"))
                    })?;
                    flags.insert(name.to_string(), value.clone());
                    i += 2;
                }
            } else {
                positional.push(a.clone());
                i += 1;
            }
        }
        Ok(Args { positional, flags, bools })
    }

    fn expr(&self, what: &str) -> Result<&str, CliError> {
        self.positional
            .first()
            .map(String::as_str)
            .ok_or_else(|| CliError::Usage(format!("missing {what}")))
    }

    fn flag(&self, name: &str) -> Option<&str> {
        self.flags.get(name).map(String::as_str)
    }

    fn required(&self, name: &str) -> Result<&str, CliError> {
        self.flag(name).ok_or_else(|| CliError::Usage(format!("missing --{name}")))
    }

    fn has_float(&self) -> bool {
        self.bools.iter().any(|b| b == "float")
    }

    fn rat(&self, name: &str) -> Result<Rat, CliError> {
        let raw = self.required(name)?;
        rat_from_str(raw).ok_or_else(|| CliError::Usage(format!("--{name} expects p/q")))
    }

    fn usize_flag(&self, name: &str, default: usize) -> Result<usize, CliError> {
        match self.flag(name) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Usage(format!("--{name} expects an integer"))),
        }
    }
}

/// Dispatch one command. `stdin` substitutes for any flag whose value is
/// `-`.
pub fn run(args: &[String], stdin: &str) -> CommandResult {
    match run_inner(args, stdin) {
        Ok(result) => result,
        Err(err) => CommandResult {
            status: exit_code(&err),
            json: json!({
                "error": {
                    "code": exit_code(&err),
                    "kind": error_kind(&err),
                    "message": err.to_string(),
                }
            }),
            svg: None,
        },
    }
}

fn run_inner(args: &[String], stdin: &str) -> Result<CommandResult, CliError> {
    let command = args
        .first()
        .ok_or_else(|| CliError::Usage("no command given".into()))?
        .clone();
    let mut rest: Vec<String> = args[1..].to_vec();
    for a in &mut rest {
        if a == "-" {
            *a = stdin.to_string();
        }
    }
    let args = Args::parse(&rest)?;
    let json = match command.as_str() {
        "eval" => cmd_eval(&args)?,
        "tropicalize" => cmd_tropicalize(&args)?,
        "hypersurface" => return cmd_hypersurface(&args),
        "balance" => cmd_balance(&args)?,
        "basis" => cmd_basis(&args)?,
        "relations" => cmd_relations(&args)?,
        "explode-ncd" => cmd_explode_ncd(&args)?,
        "explode-toric" => cmd_explode_toric(&args)?,
        "refine" => cmd_refine(&args)?,
        "fiber-product" => cmd_fiber_product(&args)?,
        "degenerate" => cmd_degenerate(&args)?,
        "fiber" => return cmd_fiber(&args),
        "pants" => cmd_pants(&args)?,
        "strata-op" => cmd_strata_op(&args)?,
        "seminorm" => cmd_seminorm(&args)?,
        other => return Err(CliError::Usage(format!("unknown command {other:?}"))),
    };
    Ok(CommandResult { status: 0, json, svg: None })
}

fn cmd_eval(args: &Args) -> Result<Value, CliError> {
    let poly = parse_polynomial(args.expr("polynomial expression")?, 0)?;
    let point = parse_point(args.required("at")?)?;
    if point.exp_coords.len() < poly.variables() {
        return Err(CliError::Usage(format!(
            "point has {} coordinates but the polynomial uses {}",
            point.exp_coords.len(),
            poly.variables()
        )));
    }
    let value = poly.evaluate(&point);
    let mut out = json!({
        "coeff": crate::arith::gauss_to_string(value.coeff()),
        "exp": rat_to_string(value.exponent()),
        "inZeroLocus": value.has_zero_coeff(),
    });
    if args.has_float() {
        out["coeffFloat"] = json!([
            rat_to_f64(&value.coeff().re),
            rat_to_f64(&value.coeff().im)
        ]);
        out["expFloat"] = json!(rat_to_f64(value.exponent()));
    }
    Ok(out)
}

fn cmd_tropicalize(args: &Args) -> Result<Value, CliError> {
    let vars = args.usize_flag("vars", 0)?;
    let poly = parse_polynomial(args.expr("polynomial expression")?, vars)?;
    let trop = poly.tropicalize();
    let pieces: Vec<Value> = trop
        .pieces
        .iter()
        .map(|(a, alpha)| json!({ "a": rat_to_string(a), "alpha": alpha }))
        .collect();
    Ok(json!({ "pieces": pieces }))
}

fn ambient_polytope(args: &Args, vars: usize) -> Result<AffinePolytope, CliError> {
    match args.flag("polytope") {
        None => Ok(AffinePolytope::whole_space(vars)),
        Some(raw) => parse_polytope_json(raw),
    }
}

fn cmd_hypersurface(args: &Args) -> Result<CommandResult, CliError> {
    let vars = args.usize_flag("vars", 0)?;
    let poly = parse_polynomial(args.expr("polynomial expression")?, vars)?;
    let ambient = ambient_polytope(args, poly.variables())?;
    if ambient.dim() != poly.variables() {
        return Err(CliError::Usage(
            "ambient polytope dimension must match the polynomial".into(),
        ));
    }
    let locus = corner_locus(&poly, &ambient)?;
    let json = weighted_complex_json(&locus);
    let svg = if args.flag("svg").is_some() || args.flag("viewport").is_some() {
        Some(render_svg(&locus, &viewport(args)?)?)
    } else {
        None
    };
    Ok(CommandResult { status: 0, json, svg })
}

fn cmd_balance(args: &Args) -> Result<Value, CliError> {
    let vars = args.usize_flag("vars", 0)?;
    let poly = parse_polynomial(args.expr("polynomial expression")?, vars)?;
    let ambient = ambient_polytope(args, poly.variables())?;
    let locus = corner_locus(&poly, &ambient)?;
    let report = is_balanced(&locus)?;
    Ok(json!({
        "balanced": report.balanced,
        "violation": report.violation,
    }))
}

fn chart_json(chart: &Chart) -> Value {
    let basis: Vec<Value> = chart
        .basis()
        .iter()
        .map(|b| json!({ "a": rat_to_string(&b.a), "alpha": b.alpha }))
        .collect();
    let relations: Vec<Value> = chart
        .relations()
        .iter()
        .map(|r| {
            json!({
                "lhs": r.lhs(),
                "rhs": r.rhs(),
                "constant": format!("t^{}", rat_to_string(&r.t_exponent)),
            })
        })
        .collect();
    json!({ "basis": basis, "relations": relations })
}

fn cmd_basis(args: &Args) -> Result<Value, CliError> {
    let polytope = parse_polytope_json(args.required("polytope")?)?;
    let n = args.usize_flag("n", 0)?;
    let chart = Chart::new(n, polytope)?;
    let mut out = chart_json(&chart);
    out["n"] = json!(chart.real_factor());
    out["realDimension"] = json!(chart.real_dimension());
    Ok(out)
}

fn cmd_relations(args: &Args) -> Result<Value, CliError> {
    let polytope = parse_polytope_json(args.required("polytope")?)?;
    let chart = Chart::new(0, polytope)?;
    Ok(json!({ "relations": chart_json(&chart)["relations"] }))
}

fn cmd_explode_ncd(args: &Args) -> Result<Value, CliError> {
    let cfg: NCConfiguration = serde_json::from_str(args.required("config")?)
        .map_err(|e| CliError::Json(e.to_string()))?;
    let complex = explode_ncd(&cfg)?;
    Ok(abstract_complex_json(&complex))
}

fn parse_fan_json(raw: &str) -> Result<Fan, CliError> {
    #[derive(serde::Deserialize)]
    struct FanJson {
        dim: usize,
        cones: Vec<Vec<Vec<i64>>>,
    }
    let parsed: FanJson = serde_json::from_str(raw).map_err(|e| CliError::Json(e.to_string()))?;
    let cones: Vec<Cone> = parsed
        .cones
        .iter()
        .map(|gens| Cone::from_generators(parsed.dim, gens))
        .collect();
    Ok(Fan::from_maximal_cones(parsed.dim, cones))
}

fn cmd_explode_toric(args: &Args) -> Result<Value, CliError> {
    let fan = parse_fan_json(args.required("fan")?)?;
    let moment = match args.flag("polytope") {
        None => None,
        Some(raw) => Some(parse_polytope_json(raw)?),
    };
    let complex = explode_toric(&fan, moment.as_ref())?;
    let mut out = geometric_complex_json(&complex);
    out["rays"] = json!(fan.rays());
    Ok(out)
}

fn cmd_refine(args: &Args) -> Result<Value, CliError> {
    #[derive(serde::Deserialize)]
    struct ComplexJson {
        cells: Vec<PolytopeJson>,
    }
    #[derive(serde::Deserialize)]
    struct PiecesJson {
        cell: usize,
        pieces: Vec<PolytopeJson>,
    }
    let complex: ComplexJson = serde_json::from_str(args.required("complex")?)
        .map_err(|e| CliError::Json(e.to_string()))?;
    let cells: Vec<AffinePolytope> = complex
        .cells
        .iter()
        .map(AffinePolytope::from_json)
        .collect::<Result<_, _>>()?;
    let complex = PolyhedralComplex::geometric(cells);
    let raw_pieces: Vec<PiecesJson> = serde_json::from_str(args.required("pieces")?)
        .map_err(|e| CliError::Json(e.to_string()))?;
    let mut subdivisions = Vec::new();
    for p in &raw_pieces {
        let pieces: Vec<AffinePolytope> =
            p.pieces.iter().map(AffinePolytope::from_json).collect::<Result<_, _>>()?;
        subdivisions.push((p.cell, pieces));
    }
    let refined = refine(&complex, &subdivisions)?;
    Ok(geometric_complex_json(&refined))
}

fn parse_map_json(raw: &str) -> Result<(AffineMap, IntMatrix), CliError> {
    #[derive(serde::Deserialize)]
    struct MapJson {
        matrix: Vec<Vec<i64>>,
        offset: Vec<String>,
        domain: PolytopeJson,
        lattice: Vec<Vec<i64>>,
    }
    let parsed: MapJson = serde_json::from_str(raw).map_err(|e| CliError::Json(e.to_string()))?;
    let offset: Vec<Rat> = parsed
        .offset
        .iter()
        .map(|s| rat_from_str(s).ok_or_else(|| CliError::Json(format!("bad rational {s:?}"))))
        .collect::<Result<_, _>>()?;
    let domain = AffinePolytope::from_json(&parsed.domain)?;
    let lattice = IntMatrix::from_rows(&parsed.lattice);
    Ok((AffineMap::new(parsed.matrix, offset, domain), lattice))
}

fn cmd_fiber_product(args: &Args) -> Result<Value, CliError> {
    let (f, fl) = parse_map_json(args.required("f")?)?;
    let (g, gl) = parse_map_json(args.required("g")?)?;
    let fp = tropical_fiber_product(&f, &g, &fl, &gl)?;
    Ok(json!({
        "polytope": serde_json::to_value(fp.polytope.to_json()).unwrap(),
        "dim": fp.polytope.hull_dim(),
        "multiplicity": fp.multiplicity.to_string(),
        "zTransverse": fp.z_transverse,
    }))
}

fn parse_family_json(
    raw: &str,
) -> Result<crate::geometry::DegenerationFamily, CliError> {
    #[derive(serde::Deserialize)]
    struct FamilyJson {
        #[serde(rename = "S")]
        support: Vec<Vec<i64>>,
        coeffs: Vec<String>,
        v: Vec<i64>,
    }
    let parsed: FamilyJson =
        serde_json::from_str(raw).map_err(|e| CliError::Json(e.to_string()))?;
    let coeffs: Vec<Gaussian> = parsed
        .coeffs
        .iter()
        .map(|s| parse_coefficient(s).map_err(CliError::Parse))
        .collect::<Result<_, _>>()?;
    Ok(make_family(&parsed.support, &coeffs, &parsed.v)?)
}

fn cmd_degenerate(args: &Args) -> Result<Value, CliError> {
    let family = parse_family_json(args.required("family")?)?;
    let pieces: Vec<Value> = family
        .subdivision()
        .iter()
        .map(|p| {
            let verts: Vec<Vec<String>> = crate::polytope::vertices(p)
                .iter()
                .map(|v| v.iter().map(rat_to_string).collect())
                .collect();
            json!({ "vertices": verts })
        })
        .collect();
    Ok(json!({
        "valid": true,
        "variables": family.variables(),
        "cells": pieces,
    }))
}

fn cmd_fiber(args: &Args) -> Result<CommandResult, CliError> {
    let family = parse_family_json(args.required("family")?)?;
    let w = args.rat("w")?;
    if w.is_negative() {
        return Err(CliError::Usage("--w must be ≥ 0".into()));
    }
    let fiber = crate::geometry::family_fiber(&family, &w)?;
    let json = weighted_complex_json(&fiber);
    let svg = if args.flag("svg").is_some() || args.flag("viewport").is_some() {
        Some(render_svg(&fiber, &viewport(args)?)?)
    } else {
        None
    };
    Ok(CommandResult { status: 0, json, svg })
}

fn cmd_pants(args: &Args) -> Result<Value, CliError> {
    let family = parse_family_json(args.required("family")?)?;
    let w = args.rat("w")?;
    if !w.is_positive() {
        return Err(CliError::Usage("--w must be > 0".into()));
    }
    let census = pants_census(&family, &w)?;
    Ok(json!({
        "vertices": census.vertices,
        "boundedEdges": census.bounded_edges,
        "rays": census.rays,
    }))
}

/// Convert an expression in the chart coordinates into a [`CPoly`]:
/// constant exponents and nonnegative powers only.
fn expression_to_cpoly(text: &str, nvars: usize) -> Result<CPoly, CliError> {
    let poly = parse_polynomial(text, nvars)?;
    if poly.variables() > nvars {
        return Err(CliError::Usage(format!(
            "function uses z{} but the chart has only {} smooth coordinates",
            poly.variables(),
            nvars
        )));
    }
    let mut out = CPoly::zero(nvars);
    for term in poly.terms() {
        if !term.a.is_zero() {
            return Err(CliError::Usage(
                "test functions may not contain t-powers".into(),
            ));
        }
        if term.alpha.iter().any(|&e| e < 0) {
            return Err(CliError::Usage(
                "test functions may not contain negative powers".into(),
            ));
        }
        let z: Vec<u8> = term.alpha.iter().map(|&e| e as u8).collect();
        out.add_term(z, vec![0; nvars], term.coeff.clone());
    }
    Ok(out)
}

fn parse_strata_list(raw: &str) -> Result<Vec<usize>, CliError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage("--strata expects comma-separated indices".into()))
        })
        .collect()
}

fn cmd_strata_op(args: &Args) -> Result<Value, CliError> {
    let polytope = parse_polytope_json(args.required("polytope")?)?;
    let chart = Chart::new(0, polytope)?;
    let collection = parse_strata_list(args.required("strata")?)?;
    let f = TestFunction::Poly(expression_to_cpoly(
        args.required("function")?,
        chart.basis().len(),
    )?);
    let op = args.required("op")?;
    let result = match op {
        "e" => {
            let mut current = f;
            for &s in &collection {
                current = e_s(&current, s, &chart)?;
            }
            current
        }
        "delta" => delta_i(&f, &collection, &chart)?,
        other => return Err(CliError::Usage(format!("unknown strata op {other:?}"))),
    };
    let rendered = match &result {
        TestFunction::Poly(p) => p.to_string(),
        TestFunction::BlackBox { .. } => unreachable!("polynomial input"),
    };
    Ok(json!({
        "op": op,
        "strata": collection,
        "result": rendered,
    }))
}

fn default_grid() -> usize {
    std::env::var("TROPEX_GRID")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(4)
}

fn cmd_seminorm(args: &Args) -> Result<Value, CliError> {
    let polytope = parse_polytope_json(args.required("polytope")?)?;
    let chart = Chart::new(0, polytope)?;
    let f = TestFunction::Poly(expression_to_cpoly(
        args.required("function")?,
        chart.basis().len(),
    )?);
    let k = args.usize_flag("k", 1)?;
    let delta = args.rat("delta")?;
    let radius = args.rat("radius")?;
    let grid = args.usize_flag("grid", default_grid())?;
    let region = Region::polydisc(chart.basis().len(), radius);
    if let Some(raw) = args.flag("strata") {
        // Single-collection bound check.
        let collection = parse_strata_list(raw)?;
        let report = verify_delta_bound(&f, &collection, &chart, &region, grid)?;
        let mut out = json!({
            "supRatio": rat_to_string(&report.sup_ratio),
            "monotone": report.monotone,
        });
        if args.has_float() {
            out["supRatioFloat"] = json!(rat_to_f64(&report.sup_ratio));
        }
        return Ok(out);
    }
    let est = seminorm_estimate(&f, k, &delta, &chart, &region, grid)?;
    let mut per_i = serde_json::Map::new();
    for (collection, sup) in &est.per_collection {
        let key = collection
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",");
        per_i.insert(key, json!(rat_to_string(sup)));
    }
    let mut out = json!({
        "seminorm": rat_to_string(&est.total),
        "perI": per_i,
    });
    if args.has_float() {
        out["seminormFloat"] = json!(rat_to_f64(&est.total));
    }
    Ok(out)
}

fn parse_polytope_json(raw: &str) -> Result<AffinePolytope, CliError> {
    let parsed: PolytopeJson =
        serde_json::from_str(raw).map_err(|e| CliError::Json(e.to_string()))?;
    Ok(AffinePolytope::from_json(&parsed)?)
}

/// JSON for a weighted complex: shape-encoded cells sorted by dimension
/// and canonical vertex list, weights inline.
pub fn weighted_complex_json(w: &WeightedComplex) -> Value {
    let mut cells: Vec<(Value, (usize, String))> = Vec::new();
    for (i, cell) in w.complex.cells().iter().enumerate() {
        let shape = cell_shape(cell);
        let vertices: Vec<Vec<String>> = shape
            .vertices
            .iter()
            .map(|v| v.iter().map(rat_to_string).collect())
            .collect();
        let mut value = json!({
            "dim": shape.dim,
            "vertices": vertices,
            "rays": shape.rays,
            "lines": shape.lines,
        });
        if shape.vertices.is_empty() {
            value["base"] = json!(shape
                .base
                .iter()
                .map(rat_to_string)
                .collect::<Vec<String>>());
        }
        if let Some(weight) = w.weights.get(&i) {
            value["weight"] = json!(weight);
        }
        let key = (shape.dim, value.to_string());
        cells.push((value, key));
    }
    cells.sort_by(|a, b| a.1.cmp(&b.1));
    json!({ "cells": cells.into_iter().map(|(v, _)| v).collect::<Vec<Value>>() })
}

/// JSON for a geometric complex: shape-encoded cells in complex order plus
/// incidence pairs.
pub fn geometric_complex_json(c: &PolyhedralComplex) -> Value {
    let cells: Vec<Value> = c
        .cells()
        .iter()
        .map(|cell| {
            let shape = cell_shape(cell);
            let vertices: Vec<Vec<String>> = shape
                .vertices
                .iter()
                .map(|v| v.iter().map(rat_to_string).collect())
                .collect();
            json!({
                "dim": shape.dim,
                "vertices": vertices,
                "rays": shape.rays,
                "lines": shape.lines,
            })
        })
        .collect();
    let mut incidences: Vec<(usize, usize)> =
        c.incidences().iter().map(|i| (i.sub, i.sup)).collect();
    incidences.sort();
    incidences.dedup();
    let incidences: Vec<Value> =
        incidences.into_iter().map(|(sub, sup)| json!({ "sub": sub, "sup": sup })).collect();
    json!({ "cells": cells, "incidences": incidences })
}

/// JSON for an abstract complex (cells in their own ambient dimensions).
pub fn abstract_complex_json(c: &PolyhedralComplex) -> Value {
    let cells: Vec<Value> = c
        .cells()
        .iter()
        .map(|cell| json!({ "dim": cell.dim() }))
        .collect();
    let mut incidences: Vec<Value> = c
        .incidences()
        .iter()
        .map(|i| {
            json!({
                "sub": i.sub,
                "sup": i.sup,
                "matrix": i.embedding.matrix,
            })
        })
        .collect();
    incidences.sort_by_key(|v| v.to_string());
    json!({ "cells": cells, "incidences": incidences })
}

/// Viewport `x0,y0,x1,y1` (exact rationals), default `[-5,5]²`.
fn viewport(args: &Args) -> Result<[Rat; 4], CliError> {
    match args.flag("viewport") {
        None => Ok([
            crate::arith::rat_int(-5),
            crate::arith::rat_int(-5),
            crate::arith::rat_int(5),
            crate::arith::rat_int(5),
        ]),
        Some(raw) => {
            let parts: Vec<Rat> = raw
                .split(',')
                .map(|s| {
                    rat_from_str(s.trim())
                        .ok_or_else(|| CliError::Usage("--viewport expects x0,y0,x1,y1".into()))
                })
                .collect::<Result<_, _>>()?;
            if parts.len() != 4 || parts[0] >= parts[2] || parts[1] >= parts[3] {
                return Err(CliError::Usage("--viewport expects x0,y0,x1,y1".into()));
            }
            Ok([parts[0].clone(), parts[1].clone(), parts[2].clone(), parts[3].clone()])
        }
    }
}

const SVG_SIZE: f64 = 400.0;

/// Render the 1-cells of a planar weighted complex as SVG lines, clipped
/// to the viewport; weights ≥ 2 are labeled at the midpoint.
pub fn render_svg(w: &WeightedComplex, viewport: &[Rat; 4]) -> Result<String, CliError> {
    if w.complex.cells().iter().any(|c| c.dim() != 2) {
        return Err(CliError::NotTwoDimensional);
    }
    let [x0, y0, x1, y1] = viewport.clone();
    let to_px = |p: &[f64; 2]| -> (f64, f64) {
        let sx = SVG_SIZE / (rat_to_f64(&x1) - rat_to_f64(&x0));
        let sy = SVG_SIZE / (rat_to_f64(&y1) - rat_to_f64(&y0));
        ((p[0] - rat_to_f64(&x0)) * sx, (rat_to_f64(&y1) - p[1]) * sy)
    };
    let mut body = String::new();
    let mut indices: Vec<usize> = w.complex.cells_of_dim(1);
    indices.sort_by_key(|&i| w.complex.cells()[i].sort_key());
    for idx in indices {
        let cell = &w.complex.cells()[idx];
        let shape = cell_shape(cell);
        // Parametrize the 1-cell as base + t·dir over a t-interval.
        let (base, dir, t_range): (Vec<Rat>, Vec<i64>, (Option<Rat>, Option<Rat>)) =
            match (shape.vertices.len(), shape.rays.len(), shape.lines.len()) {
                (2, _, _) => {
                    let d: Vec<Rat> = shape.vertices[1]
                        .iter()
                        .zip(&shape.vertices[0])
                        .map(|(a, b)| a.clone() - b)
                        .collect();
                    // Integer direction is only used for labels here; keep
                    // the exact rational step via t ∈ [0,1].
                    let dir: Vec<i64> = vec![0, 0];
                    let _ = dir;
                    ((shape.vertices[0].clone()), rational_dir(&d), {
                        (Some(Rat::zero()), Some(rational_dir_scale(&d)))
                    })
                }
                (1, 1, _) => (
                    shape.vertices[0].clone(),
                    shape.rays[0].clone(),
                    (Some(Rat::zero()), None),
                ),
                (0, _, 1) => (shape.base.clone(), shape.lines[0].clone(), (None, None)),
                _ => continue,
            };
        let clipped = clip_to_viewport(&base, &dir, t_range, viewport);
        let (ta, tb) = match clipped {
            None => continue,
            Some(range) => range,
        };
        let pa = [
            rat_to_f64(&(base[0].clone() + crate::arith::rat_int(dir[0]) * &ta)),
            rat_to_f64(&(base[1].clone() + crate::arith::rat_int(dir[1]) * &ta)),
        ];
        let pb = [
            rat_to_f64(&(base[0].clone() + crate::arith::rat_int(dir[0]) * &tb)),
            rat_to_f64(&(base[1].clone() + crate::arith::rat_int(dir[1]) * &tb)),
        ];
        let (ax, ay) = to_px(&pa);
        let (bx, by) = to_px(&pb);
        body.push_str(&format!(
            "  <line x1=\"{ax:.3}\" y1=\"{ay:.3}\" x2=\"{bx:.3}\" y2=\"{by:.3}\" stroke=\"black\" stroke-width=\"2\"/>\n"
        ));
        if let Some(&weight) = w.weights.get(&idx) {
            if weight >= 2 {
                let (mx, my) = ((ax + bx) / 2.0, (ay + by) / 2.0);
                body.push_str(&format!(
                    "  <text x=\"{:.3}\" y=\"{:.3}\" font-size=\"14\">{}</text>\n",
                    mx + 4.0,
                    my - 4.0,
                    weight
                ));
            }
        }
    }
    Ok(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n<g>\n{body}</g>\n</svg>\n",
        s = SVG_SIZE
    ))
}

/// Primitive integer direction of a rational difference vector.
fn rational_dir(d: &[Rat]) -> Vec<i64> {
    use num_integer::Integer;
    let lcm = d.iter().fold(num_bigint::BigInt::from(1), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<i64> = d
        .iter()
        .map(|r| i64::try_from(&(r.numer() * (&lcm / r.denom()))).expect("desk scale"))
        .collect();
    crate::lattice::primitive(&ints)
}

/// `t` such that `t · primitive(d) = d`.
fn rational_dir_scale(d: &[Rat]) -> Rat {
    let p = rational_dir(d);
    for (num, den) in d.iter().zip(&p) {
        if *den != 0 {
            return num.clone() / crate::arith::rat_int(*den);
        }
    }
    Rat::zero()
}

/// Intersect `{base + t·dir : t ∈ range}` with the viewport; exact.
fn clip_to_viewport(
    base: &[Rat],
    dir: &[i64],
    range: (Option<Rat>, Option<Rat>),
    viewport: &[Rat; 4],
) -> Option<(Rat, Rat)> {
    let mut lo = range.0;
    let mut hi = range.1;
    let bounds = [
        (0, viewport[0].clone(), viewport[2].clone()),
        (1, viewport[1].clone(), viewport[3].clone()),
    ];
    for (axis, min, max) in bounds {
        let b = &base[axis];
        let d = crate::arith::rat_int(dir[axis]);
        if d.is_zero() {
            if b < &min || b > &max {
                return None;
            }
            continue;
        }
        // min ≤ b + t·d ≤ max.
        let t1 = (min - b) / &d;
        let t2 = (max - b) / &d;
        let (tmin, tmax) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        lo = Some(match lo {
            None => tmin.clone(),
            Some(l) => l.max(tmin.clone()),
        });
        hi = Some(match hi {
            None => tmax.clone(),
            Some(h) => h.min(tmax.clone()),
        });
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l <= h => Some((l, h)),
        // A line fully inside (possible only with a zero direction) has no
        // finite clip; skip it.
        _ => None,
    }
}

/// Serialize a command result deterministically (sorted keys).
pub fn to_json_string(result: &CommandResult) -> String {
    serde_json::to_string_pretty(&result.json).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cmd(args: &[&str]) -> CommandResult {
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        run(&owned, "")
    }

    #[test]
    fn eval_command() {
        let result = run_cmd(&["eval", "z1+z2+1", "--at", "z1=-1t^0,z2=5t^1"]);
        assert_eq!(result.status, 0);
        assert_eq!(result.json["coeff"], "0");
        assert_eq!(result.json["exp"], "0");
        assert_eq!(result.json["inZeroLocus"], true);
    }

    #[test]
    fn hypersurface_command_with_svg() {
        let result = run_cmd(&["hypersurface", "z1+z2+1", "--viewport", "-5,-5,5,5"]);
        assert_eq!(result.status, 0);
        let cells = result.json["cells"].as_array().unwrap();
        assert_eq!(cells.len(), 4); // origin plus three rays
        let svg = result.svg.unwrap();
        assert_eq!(svg.matches("<line").count(), 3);
    }

    #[test]
    fn weight_label_in_svg() {
        let result =
            run_cmd(&["hypersurface", "1+z1^2", "--vars", "2", "--viewport", "-5,-5,5,5"]);
        assert_eq!(result.status, 0);
        let svg = result.svg.unwrap();
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains(">2</text>"));
    }

    #[test]
    fn empty_complex_svg() {
        let result = run_cmd(&["hypersurface", "z1 z2", "--viewport", "-5,-5,5,5"]);
        assert_eq!(result.status, 0);
        let svg = result.svg.unwrap();
        assert_eq!(svg.matches("<line").count(), 0);
        assert!(svg.contains("<g>"));
    }

    #[test]
    fn basis_command_matches_worked_example() {
        let polytope = r#"{"dim":2,"constraints":[{"a":"0","alpha":[1,0]},{"a":"0","alpha":[1,2]}]}"#;
        let result = run_cmd(&["basis", "--polytope", polytope]);
        assert_eq!(result.status, 0);
        let basis = result.json["basis"].as_array().unwrap();
        assert_eq!(basis.len(), 3);
        let relations = result.json["relations"].as_array().unwrap();
        assert_eq!(relations.len(), 1);
    }

    #[test]
    fn balance_command() {
        let result = run_cmd(&["balance", "z1+z2+1"]);
        assert_eq!(result.status, 0);
        assert_eq!(result.json["balanced"], true);
    }

    #[test]
    fn error_exit_codes() {
        let result = run_cmd(&["eval", "z1 + @", "--at", "z1=1"]);
        assert_eq!(result.status, 2);
        assert_eq!(result.json["error"]["kind"], "syntax");
        let result = run_cmd(&["nonsense"]);
        assert_eq!(result.status, 3);
        let result = run_cmd(&["basis", "--polytope", "{bad json"]);
        assert_eq!(result.status, 12);
    }

    #[test]
    fn determinism_across_runs() {
        for args in [
            vec!["basis", "--polytope", r#"{"dim":2,"constraints":[{"a":"0","alpha":[1,0]},{"a":"0","alpha":[1,2]}]}"#],
            vec!["hypersurface", "z1+z2+1"],
            vec!["tropicalize", "t^1 z1^2 + (1+1i) z2^-1"],
        ] {
            let a = to_json_string(&run_cmd(&args));
            let b = to_json_string(&run_cmd(&args));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn strata_op_command() {
        let polytope = r#"{"dim":2,"constraints":[{"a":"0","alpha":[1,0]},{"a":"0","alpha":[0,1]}]}"#;
        let result = run_cmd(&[
            "strata-op",
            "--op",
            "delta",
            "--polytope",
            polytope,
            "--strata",
            "1,2",
            "--function",
            "z1 z2 + z1 + 1",
        ]);
        assert_eq!(result.status, 0, "{}", result.json);
        assert!(result.json["result"].is_string());
    }

    #[test]
    fn pants_command() {
        let family = r#"{"S":[[0,0],[1,0],[0,1]],"coeffs":["1","1","1"],"v":[0,0,0]}"#;
        let result = run_cmd(&["pants", "--family", family, "--w", "1"]);
        assert_eq!(result.status, 0);
        assert_eq!(result.json["vertices"], 1);
        assert_eq!(result.json["rays"], 3);
    }
}
