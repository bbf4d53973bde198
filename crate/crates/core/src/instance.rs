//! Instance files: parsing, canonical JSON, bin scaling, rotation expansion and generators.
//!
//! ```json
//! {"d": 2, "bin": ["1", "1"], "rotation": "none",
//!  "itemsets": [[{"lengths": ["1/2", "0.3"], "profit": "2"}]]}
//! ```
//! `bin` defaults to the unit cube and `rotation` to `"none"`. Rotation is `"none"`,
//! `"all"`, `"fix_last_axis"` or `{"explicit": [[1, 0], ...]}`. Rationals are strings
//! (`"3/10"`, `"0.3"`) or JSON numbers.

use num::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::harmonic::HarmonicContext;
use crate::model::{is_permutation, Item, Itemset, RotationPolicy};
use crate::numeric::{format_rational, parse_rational, rat, Rational};
use crate::orientation::height_orientations;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub d: usize,
    pub bin: Vec<Rational>,
    /// Items in bin units, ids numbered in file order; itemset ids are their positions.
    pub itemsets: Vec<Itemset>,
    pub rotation: RotationPolicy,
}

fn rational_at(v: &Value, pointer: &str) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::parse(pointer, "expected a rational string or number")),
    };
    parse_rational(&text).map_err(|e| Error::parse(pointer, e.to_string()))
}

fn array_at<'a>(v: &'a Value, pointer: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(pointer, "expected an array"))
}

fn rotation_from(v: Option<&Value>, d: usize) -> Result<RotationPolicy> {
    let policy = match v {
        None | Some(Value::Null) => RotationPolicy::None,
        Some(Value::String(s)) => match s.as_str() {
            "none" => RotationPolicy::None,
            "all" => RotationPolicy::All,
            "fix_last_axis" => RotationPolicy::FixLastAxis,
            other => return Err(Error::parse("/rotation", format!("unknown rotation policy {other:?}"))),
        },
        Some(Value::Object(o)) => {
            let perms = o
                .get("explicit")
                .ok_or_else(|| Error::parse("/rotation", "expected an \"explicit\" key"))?;
            let perms = array_at(perms, "/rotation/explicit")?;
            let mut out = Vec::with_capacity(perms.len());
            for (i, p) in perms.iter().enumerate() {
                let ptr = format!("/rotation/explicit/{i}");
                let p: Vec<usize> = array_at(p, &ptr)?
                    .iter()
                    .map(|x| x.as_u64().map(|x| x as usize))
                    .collect::<Option<_>>()
                    .ok_or_else(|| Error::parse(&ptr, "expected axis indices"))?;
                if !is_permutation(&p, d) {
                    return Err(Error::parse(&ptr, format!("not a permutation of {d} axes")));
                }
                out.push(p);
            }
            if out.is_empty() {
                return Err(Error::parse("/rotation/explicit", "empty permutation set"));
            }
            RotationPolicy::Explicit(out)
        }
        Some(_) => return Err(Error::parse("/rotation", "expected a string or object")),
    };
    Ok(policy)
}

fn rotation_to_json(p: &RotationPolicy) -> Value {
    match p {
        RotationPolicy::None => json!("none"),
        RotationPolicy::All => json!("all"),
        RotationPolicy::FixLastAxis => json!("fix_last_axis"),
        RotationPolicy::Explicit(perms) => json!({ "explicit": perms }),
    }
}

fn fits(lengths: &[Rational], bin: &[Rational]) -> bool {
    lengths.iter().zip(bin).all(|(x, l)| x <= l)
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::parse("", e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::parse("", "expected an object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "d" | "bin" | "itemsets" | "rotation") {
                return Err(Error::parse(format!("/{key}"), "unknown key"));
            }
        }
        let d = obj
            .get("d")
            .and_then(Value::as_u64)
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::parse("/d", "expected a positive integer"))? as usize;
        let bin = match obj.get("bin") {
            None | Some(Value::Null) => vec![Rational::one(); d],
            Some(b) => {
                let b = array_at(b, "/bin")?;
                if b.len() != d {
                    return Err(Error::parse("/bin", format!("expected {d} lengths")));
                }
                let mut out = Vec::with_capacity(d);
                for (j, x) in b.iter().enumerate() {
                    let ptr = format!("/bin/{j}");
                    let x = rational_at(x, &ptr)?;
                    if !x.is_positive() {
                        return Err(Error::parse(&ptr, "bin lengths must be positive"));
                    }
                    out.push(x);
                }
                out
            }
        };
        let rotation = rotation_from(obj.get("rotation"), d)?;
        let sets = array_at(obj.get("itemsets").ok_or_else(|| Error::parse("/itemsets", "missing"))?, "/itemsets")?;
        let mut itemsets = Vec::with_capacity(sets.len());
        let mut next_id = 0;
        for (s, set) in sets.iter().enumerate() {
            let ptr = format!("/itemsets/{s}");
            let members = array_at(set, &ptr)?;
            if members.is_empty() {
                return Err(Error::parse(&ptr, "an itemset needs at least one item"));
            }
            let mut items = Vec::with_capacity(members.len());
            for (m, member) in members.iter().enumerate() {
                let ptr = format!("{ptr}/{m}");
                let mo = member.as_object().ok_or_else(|| Error::parse(&ptr, "expected an object"))?;
                for key in mo.keys() {
                    if !matches!(key.as_str(), "lengths" | "profit") {
                        return Err(Error::parse(format!("{ptr}/{key}"), "unknown key"));
                    }
                }
                let lptr = format!("{ptr}/lengths");
                let raw = array_at(mo.get("lengths").ok_or_else(|| Error::parse(&lptr, "missing"))?, &lptr)?;
                if raw.len() != d {
                    return Err(Error::parse(&lptr, format!("expected {d} lengths")));
                }
                let mut lengths = Vec::with_capacity(d);
                for (j, x) in raw.iter().enumerate() {
                    let jptr = format!("{lptr}/{j}");
                    let x = rational_at(x, &jptr)?;
                    if !x.is_positive() {
                        return Err(Error::parse(&jptr, "lengths must be positive"));
                    }
                    if rotation == RotationPolicy::None && x > bin[j] {
                        return Err(Error::parse(&jptr, format!("{} exceeds the bin", format_rational(&x))));
                    }
                    lengths.push(x);
                }
                let mut item = Item::new(next_id, lengths);
                next_id += 1;
                if let Some(p) = mo.get("profit") {
                    let pptr = format!("{ptr}/profit");
                    let p = rational_at(p, &pptr)?;
                    if p.is_negative() {
                        return Err(Error::parse(&pptr, "profit must be non-negative"));
                    }
                    item = item.with_profit(p);
                }
                if !rotation
                    .permutations(d)
                    .iter()
                    .any(|perm| fits(&item.permuted(perm).lengths, &bin))
                {
                    return Err(Error::parse(&ptr, "no allowed orientation fits the bin"));
                }
                items.push(item);
            }
            itemsets.push(Itemset::new(s, items));
        }
        Ok(Instance {
            d,
            bin,
            itemsets,
            rotation,
        })
    }

    /// Canonical form: every key present, rationals in lowest terms.
    pub fn to_json(&self) -> Value {
        let sets: Vec<Value> = self
            .itemsets
            .iter()
            .map(|set| {
                Value::Array(
                    set.members
                        .iter()
                        .map(|it| {
                            let mut m = Map::new();
                            m.insert(
                                "lengths".into(),
                                it.lengths.iter().map(|x| json!(format_rational(x))).collect(),
                            );
                            if let Some(p) = &it.profit {
                                m.insert("profit".into(), json!(format_rational(p)));
                            }
                            Value::Object(m)
                        })
                        .collect(),
                )
            })
            .collect();
        json!({
            "d": self.d,
            "bin": self.bin.iter().map(format_rational).collect::<Vec<_>>(),
            "rotation": rotation_to_json(&self.rotation),
            "itemsets": sets,
        })
    }

    /// Compact canonical JSON with sorted keys.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("values serialize")
    }

    pub fn is_unit_bin(&self) -> bool {
        self.bin.iter().all(|x| x.is_one())
    }

    pub fn item_count(&self) -> usize {
        self.itemsets.iter().map(|s| s.members.len()).sum()
    }

    /// True when no itemset offers a choice.
    pub fn is_plain(&self) -> bool {
        self.rotation == RotationPolicy::None && self.itemsets.iter().all(|s| s.members.len() == 1)
    }

    /// Plain items in unit-bin coordinates; only for instances without choices.
    pub fn unit_items(&self) -> Result<Vec<Item>> {
        if !self.is_plain() {
            return Err(Error::Input(
                "instance has itemsets or rotations; use a multiple-choice solver".into(),
            ));
        }
        Ok(self
            .itemsets
            .iter()
            .map(|s| s.members[0].scaled_down(&self.bin))
            .collect())
    }

    /// Itemsets in unit-bin coordinates; every member expands to its allowed
    /// orientations that fit the bin, duplicates collapsed.
    pub fn unit_itemsets(&self) -> Vec<Itemset> {
        let perms = self.rotation.permutations(self.d);
        self.itemsets
            .iter()
            .map(|set| {
                let mut members: Vec<Item> = Vec::new();
                for it in &set.members {
                    for perm in &perms {
                        let p = it.permuted(perm);
                        if !fits(&p.lengths, &self.bin) {
                            continue;
                        }
                        let scaled = p.scaled_down(&self.bin);
                        if !members.iter().any(|m| m.id == scaled.id && m.lengths == scaled.lengths) {
                            members.push(scaled);
                        }
                    }
                }
                Itemset::new(set.id, members)
            })
            .collect()
    }

    /// Like [`Instance::unit_itemsets`], but when every orientation is allowed only one
    /// member per distinct height is kept, with its base arranged to minimize `w(i)`.
    pub fn unit_itemsets_by_height(&self, ctx: &HarmonicContext) -> Vec<Itemset> {
        if self.rotation != RotationPolicy::All {
            return self.unit_itemsets();
        }
        self.itemsets
            .iter()
            .map(|set| {
                let mut members: Vec<Item> = Vec::new();
                for it in &set.members {
                    for o in height_orientations(it, &self.bin, ctx) {
                        let scaled = o.item.scaled_down(&self.bin);
                        if !members.iter().any(|m| m.id == scaled.id && m.lengths == scaled.lengths) {
                            members.push(scaled);
                        }
                    }
                }
                Itemset::new(set.id, members)
            })
            .collect()
    }

    pub fn generate(spec: &GenSpec) -> Result<Instance> {
        generate(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Distribution {
    /// Lengths uniform on the grid `{1/g, ..., g/g}`.
    Uniform,
    /// Every length of type `q`, i.e. in `(1/(q+1), 1/q]`.
    TypeStratified { q: u32 },
    /// One long length in `(1/2, 1]` on a random axis, the others at most `1/5`.
    RotationSensitive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub d: usize,
    pub distribution: Distribution,
    pub seed: u64,
    /// Members per itemset.
    pub members: usize,
    /// Attach integer profits in `1..=10`.
    pub profits: bool,
    /// Grid denominator for the uniform distribution.
    pub grid: u32,
}

impl GenSpec {
    pub fn new(n: usize, d: usize, distribution: Distribution, seed: u64) -> Self {
        GenSpec {
            n,
            d,
            distribution,
            seed,
            members: 1,
            profits: false,
            grid: 20,
        }
    }
}

// A rational drawn from the integers `lo..=hi` over `den`.
fn draw(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    rat(rng.gen_range(lo..=hi), den)
}

/// Deterministic for a fixed `GenSpec`.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    if spec.d == 0 || spec.members == 0 || spec.grid == 0 {
        return Err(Error::Input("dimension, members and grid must be positive".into()));
    }
    if let Distribution::TypeStratified { q } = spec.distribution {
        if q == 0 {
            return Err(Error::Input("type must be at least 1".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let g = i64::from(spec.grid);
    let mut itemsets = Vec::with_capacity(spec.n);
    let mut id = 0;
    for s in 0..spec.n {
        let mut members = Vec::with_capacity(spec.members);
        for _ in 0..spec.members {
            let lengths: Vec<Rational> = match &spec.distribution {
                Distribution::Uniform => (0..spec.d).map(|_| draw(&mut rng, 1, g, g)).collect(),
                Distribution::TypeStratified { q } => {
                    let q = i64::from(*q);
                    let den = 20 * q * (q + 1);
                    (0..spec.d).map(|_| draw(&mut rng, 20 * q + 1, 20 * (q + 1), den)).collect()
                }
                Distribution::RotationSensitive => {
                    let long = rng.gen_range(0..spec.d);
                    (0..spec.d)
                        .map(|j| {
                            if j == long {
                                draw(&mut rng, 11, 20, 20)
                            } else {
                                draw(&mut rng, 1, 4, 20)
                            }
                        })
                        .collect()
                }
            };
            let mut item = Item::new(id, lengths);
            id += 1;
            if spec.profits {
                item = item.with_profit(Rational::from_integer(rng.gen_range(1..=10).into()));
            }
            members.push(item);
        }
        itemsets.push(Itemset::new(s, members));
    }
    Ok(Instance {
        d: spec.d,
        bin: vec![Rational::one(); spec.d],
        itemsets,
        rotation: RotationPolicy::None,
    })
}
