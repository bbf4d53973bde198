//! Solver dispatch, reports and bound ledgers.
//!
//! A ledger recomputes each guarantee from the packed items alone: type classes,
//! volumes and bound expressions are evaluated here again, not read from the solver.

use std::fmt;
use std::time::Instant;

use num::{One, Zero};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::harmonic::{HarmonicContext, TypeVector};
use crate::hgap::{hgap, HgapOptions};
use crate::instance::Instance;
use crate::knapsack::{hdh_ks, hdh_nf};
use crate::model::{Choice, Item, Itemset, Packing, PackingKind, Placement};
use crate::numeric::{format_decimal, format_rational, parse_rational, pow, Rational};
use crate::shelves::{Shelf, ShelfTree};
use crate::validate::{validate_assortment, validate_items, validate_packing, ValidationReport};
use crate::{fullh, strip};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: Rational,
    pub relation: Relation,
    pub rhs: Rational,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        let pass = relation.holds(&lhs, &rhs);
        BoundCheck {
            name: name.into(),
            lhs,
            relation,
            rhs,
            pass,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "lhs": format_rational(&self.lhs),
            "relation": self.relation.symbol(),
            "rhs": format_rational(&self.rhs),
            "pass": self.pass,
        })
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {} {} [{}]",
            self.name,
            format_rational(&self.lhs),
            self.relation.symbol(),
            format_rational(&self.rhs),
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

fn from_usize(n: usize) -> Rational {
    Rational::from_integer(n.into())
}

fn distinct(types: impl IntoIterator<Item = Result<TypeVector>>) -> Result<usize> {
    let mut all: Vec<TypeVector> = types.into_iter().collect::<Result<_>>()?;
    all.sort();
    all.dedup();
    Ok(all.len())
}

// prod_j f_k(l_j)
fn vol_f(it: &Item, ctx: &HarmonicContext) -> Result<Rational> {
    it.lengths.iter().try_fold(Rational::one(), |acc, x| Ok(acc * ctx.f_of(x)?))
}

// prod_{j<d} f_k(l_j) * l_d
fn vol_wf(it: &Item, ctx: &HarmonicContext) -> Result<Rational> {
    let d = it.dim();
    let base = it.lengths[..d - 1]
        .iter()
        .try_fold(Rational::one(), |acc, x| Ok::<_, Error>(acc * ctx.f_of(x)?))?;
    Ok(base * &it.lengths[d - 1])
}

fn base_classes(items: &[Item], ctx: &HarmonicContext) -> Result<usize> {
    distinct(items.iter().map(|it| ctx.type_vector(&it.lengths[..it.dim() - 1], false)))
}

/// `bins < Q + vol(f_k)` and `bins >= vol` for unit-bin items.
pub fn ledger_bp(bins: usize, items: &[Item], ctx: &HarmonicContext) -> Result<Vec<BoundCheck>> {
    if items.is_empty() {
        return Ok(vec![BoundCheck::new("bins = 0", from_usize(bins), Relation::Le, Rational::zero())]);
    }
    let q = distinct(items.iter().map(|it| ctx.type_vector(&it.lengths, false)))?;
    let vf = items.iter().map(|it| vol_f(it, ctx)).sum::<Result<Rational>>()?;
    let vol: Rational = items.iter().map(Item::volume).sum();
    Ok(vec![
        BoundCheck::new("bins < Q + vol(f_k)", from_usize(bins), Relation::Lt, from_usize(q) + vf),
        BoundCheck::new("bins >= vol", from_usize(bins), Relation::Ge, vol),
    ])
}

/// `bins <= Q + ceil(2 vol(wf_k))`, `Q` counting base types.
pub fn ledger_nf(bins: usize, items: &[Item], ctx: &HarmonicContext) -> Result<Vec<BoundCheck>> {
    if items.is_empty() {
        return Ok(vec![BoundCheck::new("bins = 0", from_usize(bins), Relation::Le, Rational::zero())]);
    }
    let q = base_classes(items, ctx)?;
    let vwf = items.iter().map(|it| vol_wf(it, ctx)).sum::<Result<Rational>>()?;
    let two = Rational::from_integer(2.into());
    let vol: Rational = items.iter().map(Item::volume).sum();
    Ok(vec![
        BoundCheck::new(
            "bins <= Q + ceil(2 vol(wf_k))",
            from_usize(bins),
            Relation::Le,
            from_usize(q) + (two * vwf).ceil(),
        ),
        BoundCheck::new("bins >= vol", from_usize(bins), Relation::Ge, vol),
    ])
}

/// `height < Q + vol(wf_k)` and `height >= max(vol, tallest)` in a unit-base strip.
pub fn ledger_sp(height: &Rational, items: &[Item], ctx: &HarmonicContext) -> Result<Vec<BoundCheck>> {
    if items.is_empty() {
        return Ok(vec![BoundCheck::new("height = 0", height.clone(), Relation::Le, Rational::zero())]);
    }
    let q = base_classes(items, ctx)?;
    let vwf = items.iter().map(|it| vol_wf(it, ctx)).sum::<Result<Rational>>()?;
    let vol: Rational = items.iter().map(Item::volume).sum();
    let tallest = items.iter().map(|it| it.height().clone()).max().expect("nonempty");
    Ok(vec![
        BoundCheck::new("height < Q + vol(wf_k)", height.clone(), Relation::Lt, from_usize(q) + vwf),
        BoundCheck::new("height >= max(vol, tallest)", height.clone(), Relation::Ge, vol.max(tallest)),
    ])
}

/// Checks on an HGaP result: `bins < m/(1-δ) + t(Q-1) + 1 + δQ/(1-δ)` with `m`, `t` taken
/// from the chosen plan's fractional packing, and `t <= ceil(1/δ²)`.
pub fn ledger_hgap(
    bins: usize,
    items: &[Item],
    eps: &Rational,
    fractional_bins: usize,
    t: usize,
    ctx: &HarmonicContext,
) -> Result<Vec<BoundCheck>> {
    let one = Rational::one();
    let delta = eps / (Rational::from_integer(2.into()) + eps);
    let q = if items.is_empty() { 0 } else { base_classes(items, ctx)? };
    let (m, qf, tf) = (from_usize(fractional_bins), from_usize(q), from_usize(t));
    let rest = &one - &delta;
    let bound = &m / &rest + &tf * (&qf - &one) + &one + &delta * &qf / &rest;
    let heights = (&delta * &delta).recip().ceil();
    let vol: Rational = items.iter().map(Item::volume).sum();
    Ok(vec![
        BoundCheck::new("bins < m/(1-delta) + t(Q-1) + 1 + delta Q/(1-delta)", from_usize(bins), Relation::Lt, bound),
        BoundCheck::new("t <= ceil(1/delta^2)", tf, Relation::Le, heights),
        BoundCheck::new("bins >= vol", from_usize(bins), Relation::Ge, vol),
    ])
}

/// Knapsack checks: the bin count of the whole selection, the pigeonhole profit bound and
/// the selection's reduced size.
pub fn ledger_ks(
    profit: &Rational,
    bins_before_pick: usize,
    selection: &[Item],
    selection_profit: &Rational,
    d: usize,
) -> Result<Vec<BoundCheck>> {
    let ctx = HarmonicContext::new(3)?;
    let scale = pow(ctx.t_k(), d - 1);
    let vwf = selection.iter().map(|it| vol_wf(it, &ctx)).sum::<Result<Rational>>()?;
    let size = &vwf / &scale;
    let inner = Rational::from_integer(3u64.pow(d as u32 - 1).into())
        + (Rational::from_integer(2.into()) * &scale * &size).ceil();
    let total: Rational = selection.iter().map(Item::profit_or_zero).sum();
    let b = from_usize(bins_before_pick.max(1));
    let mut out = vec![
        BoundCheck::new("selection vol(wH_3) <= 1", size, Relation::Le, Rational::one()),
        BoundCheck::new("selection profit", total, Relation::Ge, selection_profit.clone()),
        BoundCheck::new("b * profit >= selection profit", b * profit, Relation::Ge, selection_profit.clone()),
    ];
    if !selection.is_empty() {
        out.push(BoundCheck::new(
            "b <= 3^(d-1) + ceil(2 T_3^(d-1) vol(wH_3(J)))",
            from_usize(bins_before_pick),
            Relation::Le,
            inner.clone(),
        ));
        out.push(BoundCheck::new(
            "3^(d-1) + ceil(2 T_3^(d-1) vol(wH_3(J))) <= 3^d",
            inner,
            Relation::Le,
            Rational::from_integer(3u64.pow(d as u32).into()),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// `fullh_k`, or HDH-NF when `next_fit` is set.
    Bp { next_fit: bool },
    Mcbp,
    Hgap,
    Sp,
    Mcsp,
    Ks,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Bp { next_fit: false } => "fullh",
            Solver::Bp { next_fit: true } => "hdh-nf",
            Solver::Mcbp => "fullh-mc",
            Solver::Hgap => "hgap",
            Solver::Sp => "hdh-sp",
            Solver::Mcsp => "hdh-mcsp",
            Solver::Ks => "hdh-ks",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOptions {
    pub k: u32,
    pub epsilon: Option<Rational>,
    pub budget: Option<u64>,
    pub threads: usize,
    /// Echoed into the report.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            k: 4,
            epsilon: None,
            budget: None,
            threads: 1,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub solver: String,
    pub k: u32,
    pub epsilon: Option<Rational>,
    pub delta: Option<Rational>,
    /// `bins`, `height` or `profit`.
    pub objective_name: String,
    /// In the instance's units.
    pub objective: Rational,
    pub q: Option<usize>,
    /// Name and value of the weighted volume, in unit-bin terms.
    pub volume: Option<(String, Rational)>,
    pub ledger: Vec<BoundCheck>,
    pub violations: Vec<String>,
    pub runtime_ms: f64,
    pub seed: Option<u64>,
    /// In the instance's units.
    pub packing: Packing,
    pub assortment: Vec<Choice>,
    pub details: Map<String, Value>,
}

impl Report {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.ledger.iter().all(|b| b.pass)
    }

    pub fn to_json(&self) -> Value {
        let rat_opt = |x: &Option<Rational>| x.as_ref().map(format_rational);
        json!({
            "solver": self.solver,
            "k": self.k,
            "epsilon": rat_opt(&self.epsilon),
            "delta": rat_opt(&self.delta),
            "objective": {
                "name": self.objective_name,
                "exact": format_rational(&self.objective),
                "decimal": format_decimal(&self.objective, 6),
            },
            "q": self.q,
            "volume": self.volume.as_ref().map(|(name, v)| json!({
                "name": name,
                "exact": format_rational(v),
                "decimal": format_decimal(v, 6),
            })),
            "ledger": self.ledger.iter().map(BoundCheck::to_json).collect::<Vec<_>>(),
            "valid": self.valid(),
            "violations": self.violations,
            "runtime_ms": self.runtime_ms,
            "seed": self.seed,
            "packing": packing_to_json(&self.packing),
            "assortment": self.assortment.iter().map(|c| json!({
                "itemset": c.itemset, "member": c.member, "item": c.item,
            })).collect::<Vec<_>>(),
            "details": Value::Object(self.details.clone()),
        })
    }

    /// Compact JSON with sorted keys.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("values serialize")
    }

    pub fn csv_header() -> &'static str {
        "solver,k,epsilon,objective_name,objective,objective_decimal,q,volume,ledger_pass,valid,runtime_ms,seed"
    }

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<String>| x.unwrap_or_default();
        [
            self.solver.clone(),
            self.k.to_string(),
            opt(self.epsilon.as_ref().map(format_rational)),
            self.objective_name.clone(),
            format_rational(&self.objective),
            format_decimal(&self.objective, 6),
            opt(self.q.map(|q| q.to_string())),
            opt(self.volume.as_ref().map(|(_, v)| format_rational(v))),
            self.all_pass().to_string(),
            self.valid().to_string(),
            format!("{:.3}", self.runtime_ms),
            opt(self.seed.map(|s| s.to_string())),
        ]
        .join(",")
    }
}

fn picked(itemsets: &[Itemset], assortment: &[Choice]) -> Vec<Item> {
    assortment
        .iter()
        .map(|c| itemsets[c.itemset].members[c.member].clone())
        .collect()
}

fn violations(v: ValidationReport) -> Vec<String> {
    v.violations.iter().map(ToString::to_string).collect()
}

fn epsilon_of(opts: &RunOptions) -> Result<Rational> {
    opts.epsilon
        .clone()
        .ok_or_else(|| Error::Input("this solver needs --epsilon".into()))
}

/// Solves `inst` with `solver`; the packing in the report is in the instance's units and
/// is validated in unit coordinates against the items or assortment.
pub fn run(inst: &Instance, solver: Solver, opts: &RunOptions) -> Result<Report> {
    let ctx = HarmonicContext::new(opts.k)?;
    let start = Instant::now();
    let mut details = Map::new();
    let mut epsilon = None;
    let mut delta = None;
    let mut k = opts.k;
    let (packing, assortment, objective_name, unit_objective, q, volume, ledger, checked) = match solver {
        Solver::Bp { next_fit } => {
            let items = inst.unit_items()?;
            let r = if next_fit { hdh_nf(&items, &ctx)? } else { fullh::fullh_bp(&items, &ctx)? };
            let ledger = if next_fit {
                ledger_nf(r.packing.bins, &items, &ctx)?
            } else {
                ledger_bp(r.packing.bins, &items, &ctx)?
            };
            let name = if next_fit { "vol(wf_k)" } else { "vol(f_k)" };
            let checked = validate_items(&r.packing, &items);
            let bins = from_usize(r.packing.bins);
            (r.packing, r.assortment, "bins", bins, r.stats.q, (name, r.stats.volume), ledger, checked)
        }
        Solver::Mcbp => {
            let sets = inst.unit_itemsets();
            let r = fullh::fullh_mcbp(&sets, &ctx)?;
            let ledger = ledger_bp(r.packing.bins, &picked(&sets, &r.assortment), &ctx)?;
            let checked = validate_assortment(&r.packing, &sets, &r.assortment);
            let bins = from_usize(r.packing.bins);
            (r.packing, r.assortment, "bins", bins, r.stats.q, ("vol(f_k)", r.stats.volume), ledger, checked)
        }
        Solver::Hgap => {
            let eps = epsilon_of(opts)?;
            let sets = inst.unit_itemsets_by_height(&ctx);
            let out = hgap(
                &sets,
                &eps,
                &ctx,
                HgapOptions {
                    budget: opts.budget,
                    threads: opts.threads,
                },
            )?;
            let (r, tr) = (out.result, out.trace);
            let ledger = ledger_hgap(
                r.packing.bins,
                &picked(&sets, &r.assortment),
                &eps,
                tr.fractional_bins,
                tr.t,
                &ctx,
            )?;
            details.insert("plans_evaluated".into(), json!(tr.plans_evaluated));
            details.insert("feasible_plans".into(), json!(tr.feasible_plans));
            details.insert("truncated".into(), json!(tr.truncated));
            details.insert("fractional_bins".into(), json!(tr.fractional_bins));
            details.insert("t".into(), json!(tr.t));
            if let Some(plan) = &tr.plan {
                details.insert(
                    "plan".into(),
                    json!({
                        "heights": plan.heights.iter().map(format_rational).collect::<Vec<_>>(),
                        "bins": plan.bins,
                    }),
                );
            }
            epsilon = Some(eps);
            delta = Some(tr.delta);
            let checked = validate_assortment(&r.packing, &sets, &r.assortment);
            let bins = from_usize(r.packing.bins);
            (r.packing, r.assortment, "bins", bins, r.stats.q, ("vol(rounded)", r.stats.volume), ledger, checked)
        }
        Solver::Sp | Solver::Mcsp => {
            let (r, items, checked_sets) = if solver == Solver::Sp {
                let items = inst.unit_items()?;
                (strip::hdh_sp(&items, &ctx)?, items, None)
            } else {
                let sets = inst.unit_itemsets();
                let r = strip::hdh_mcsp(&sets, &ctx)?;
                let items = picked(&sets, &r.assortment);
                (r, items, Some(sets))
            };
            let height = r.packing.height();
            let ledger = ledger_sp(&height, &items, &ctx)?;
            let checked = match &checked_sets {
                Some(sets) => validate_assortment(&r.packing, sets, &r.assortment),
                None => validate_items(&r.packing, &items),
            };
            let last = inst.bin.last().expect("d >= 1").clone();
            (r.packing, r.assortment, "height", height * last, r.stats.q, ("vol(wf_k)", r.stats.volume), ledger, checked)
        }
        Solver::Ks => {
            let eps = epsilon_of(opts)?;
            let sets = inst.unit_itemsets();
            let r = hdh_ks(&sets, &eps)?;
            k = 3;
            let ledger = ledger_ks(
                &r.profit,
                r.bins_before_pick,
                &picked(&sets, &r.selection),
                &r.selection_profit,
                inst.d,
            )?;
            details.insert("bins_before_pick".into(), json!(r.bins_before_pick));
            details.insert("selection_profit".into(), json!(format_rational(&r.selection_profit)));
            // only the packed members are in the bin; check them as a plain item list
            let packed = picked(&sets, &r.assortment);
            let checked = validate_items(&r.packing, &packed);
            epsilon = Some(eps);
            let vol: Rational = packed.iter().map(Item::volume).sum();
            (r.packing, r.assortment, "profit", r.profit, packed.len(), ("vol", vol), ledger, checked)
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1000.0;
    Ok(Report {
        solver: solver.name().into(),
        k,
        epsilon,
        delta,
        objective_name: objective_name.into(),
        objective: unit_objective,
        q: Some(q),
        volume: Some((volume.0.into(), volume.1)),
        ledger,
        violations: violations(checked),
        runtime_ms,
        seed: opts.seed,
        packing: packing.scaled_up(&inst.bin),
        assortment,
        details,
    })
}

/// Validates a packing in the instance's units against `inst`: the plain items, or the
/// chosen members when `assortment` is given. Member indices depend on how a solver
/// expanded rotations, so each choice is matched to an allowed orientation of its item
/// by the placed lengths.
pub fn check_against(packing: &Packing, inst: &Instance, assortment: Option<&[Choice]>) -> ValidationReport {
    let inverse: Vec<Rational> = inst.bin.iter().map(Rational::recip).collect();
    let unit = packing.scaled_up(&inverse);
    match assortment {
        Some(a) if !a.is_empty() || !inst.is_plain() => {
            // an assortment may cover only part of the itemsets (knapsack)
            let used: Vec<Itemset> = inst
                .unit_itemsets()
                .into_iter()
                .filter(|s| a.iter().any(|c| c.itemset == s.id))
                .collect();
            let choices: Vec<Choice> = a
                .iter()
                .map(|c| {
                    let placed = unit.placements.iter().find(|pl| pl.item == c.item);
                    let member = used.iter().find(|s| s.id == c.itemset).and_then(|s| {
                        s.members
                            .iter()
                            .position(|m| m.id == c.item && placed.is_some_and(|pl| pl.lengths == m.lengths))
                    });
                    Choice {
                        member: member.unwrap_or(c.member),
                        ..c.clone()
                    }
                })
                .collect();
            validate_assortment(&unit, &used, &choices)
        }
        _ => match inst.unit_items() {
            Ok(items) => validate_items(&unit, &items),
            Err(_) => validate_packing(&unit),
        },
    }
}

fn tree_to_json(t: &ShelfTree) -> Value {
    match t {
        ShelfTree::Line(ids) => json!({ "line": ids }),
        ShelfTree::Stack(shelves) => json!({
            "stack": shelves.iter().map(|s| json!({
                "height": format_rational(&s.height),
                "offset": format_rational(&s.offset),
                "base": tree_to_json(&s.base),
            })).collect::<Vec<_>>()
        }),
    }
}

pub fn packing_to_json(p: &Packing) -> Value {
    let rats = |xs: &[Rational]| xs.iter().map(format_rational).collect::<Vec<_>>();
    json!({
        "kind": match p.kind { PackingKind::Bin => "bin", PackingKind::Strip => "strip" },
        "container": rats(&p.container),
        "bins": p.bins,
        "placements": p.placements.iter().map(|pl| json!({
            "item": pl.item,
            "bin": pl.bin,
            "orientation": pl.orientation,
            "lengths": rats(&pl.lengths),
            "position": rats(&pl.position),
        })).collect::<Vec<_>>(),
        "shelves": p.shelves.as_ref().map(|ts| ts.iter().map(tree_to_json).collect::<Vec<_>>()),
    })
}

fn field<'a>(v: &'a Value, key: &str, pointer: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::parse(format!("{pointer}/{key}"), "missing"))
}

fn usize_at(v: &Value, pointer: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(pointer, "expected a non-negative integer"))
}

fn rationals_at(v: &Value, pointer: &str) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::parse(pointer, "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{pointer}/{i}");
            let s = x.as_str().ok_or_else(|| Error::parse(&p, "expected a rational string"))?;
            parse_rational(s).map_err(|e| Error::parse(&p, e.to_string()))
        })
        .collect()
}

fn tree_from_json(v: &Value, pointer: &str) -> Result<ShelfTree> {
    if let Some(ids) = v.get("line") {
        let ids = ids
            .as_array()
            .ok_or_else(|| Error::parse(format!("{pointer}/line"), "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, x)| usize_at(x, &format!("{pointer}/line/{i}")))
            .collect::<Result<_>>()?;
        return Ok(ShelfTree::Line(ids));
    }
    let ptr = format!("{pointer}/stack");
    let shelves = field(v, "stack", pointer)?
        .as_array()
        .ok_or_else(|| Error::parse(&ptr, "expected an array"))?;
    let mut out = Vec::with_capacity(shelves.len());
    for (i, s) in shelves.iter().enumerate() {
        let p = format!("{ptr}/{i}");
        let one = |key: &str| -> Result<Rational> {
            let x = field(s, key, &p)?;
            let text = x
                .as_str()
                .ok_or_else(|| Error::parse(format!("{p}/{key}"), "expected a rational string"))?;
            parse_rational(text).map_err(|e| Error::parse(format!("{p}/{key}"), e.to_string()))
        };
        out.push(Shelf {
            height: one("height")?,
            offset: one("offset")?,
            base: tree_from_json(field(s, "base", &p)?, &format!("{p}/base"))?,
        });
    }
    Ok(ShelfTree::Stack(out))
}

/// Reads a packing written by [`packing_to_json`]; also accepts a whole report.
pub fn packing_from_json(v: &Value) -> Result<Packing> {
    if let Some(inner) = v.get("packing") {
        return packing_from_json(inner).map_err(|e| match e {
            Error::Parse { pointer, message } => Error::parse(format!("/packing{pointer}"), message),
            other => other,
        });
    }
    let kind = match field(v, "kind", "")?.as_str() {
        Some("bin") => PackingKind::Bin,
        Some("strip") => PackingKind::Strip,
        _ => return Err(Error::parse("/kind", "expected \"bin\" or \"strip\"")),
    };
    let container = rationals_at(field(v, "container", "")?, "/container")?;
    let bins = usize_at(field(v, "bins", "")?, "/bins")?;
    let raw = field(v, "placements", "")?
        .as_array()
        .ok_or_else(|| Error::parse("/placements", "expected an array"))?;
    let mut placements = Vec::with_capacity(raw.len());
    for (i, pl) in raw.iter().enumerate() {
        let p = format!("/placements/{i}");
        let orientation = field(pl, "orientation", &p)?
            .as_array()
            .ok_or_else(|| Error::parse(format!("{p}/orientation"), "expected an array"))?
            .iter()
            .enumerate()
            .map(|(j, x)| usize_at(x, &format!("{p}/orientation/{j}")))
            .collect::<Result<_>>()?;
        placements.push(Placement {
            item: usize_at(field(pl, "item", &p)?, &format!("{p}/item"))?,
            bin: usize_at(field(pl, "bin", &p)?, &format!("{p}/bin"))?,
            orientation,
            lengths: rationals_at(field(pl, "lengths", &p)?, &format!("{p}/lengths"))?,
            position: rationals_at(field(pl, "position", &p)?, &format!("{p}/position"))?,
        });
    }
    let shelves = match v.get("shelves") {
        None | Some(Value::Null) => None,
        Some(Value::Array(ts)) => Some(
            ts.iter()
                .enumerate()
                .map(|(i, t)| tree_from_json(t, &format!("/shelves/{i}")))
                .collect::<Result<_>>()?,
        ),
        Some(_) => return Err(Error::parse("/shelves", "expected an array or null")),
    };
    Ok(Packing {
        kind,
        container,
        bins,
        placements,
        shelves,
    })
}

/// Reads the `assortment` array of a report, if present.
pub fn assortment_from_json(v: &Value) -> Result<Option<Vec<Choice>>> {
    match v.get("assortment") {
        None | Some(Value::Null) => Ok(None),
        Some(a) => serde_json::from_value(a.clone())
            .map(Some)
            .map_err(|e| Error::parse("/assortment", e.to_string())),
    }
}

/// `3^-d (1 - ε)`, the knapsack guarantee factor.
pub fn ks_factor(eps: &Rational, d: usize) -> Rational {
    (Rational::one() - eps) / Rational::from_integer(3u64.pow(d as u32).into())
}
