//! Search criteria: the item list, the `f2` transform family, the match
//! predicate over list positions, and its sign-extended form over
//! signed-magnitude indices.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::index::{BitString, SignedIndex, MAX_MAGNITUDE_BITS};

/// Largest list a generator will materialise (2^24 items).
pub const MAX_GENERATED_MAGNITUDE_BITS: u32 = 24;

const MAX_FILL_ATTEMPTS: usize = 1000;

/// The closed family of item transforms.
///
/// `Truncate` and `XorFold` keep the most-significant end of the item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F2Kind {
    Identity,
    /// The `l` most-significant bits.
    Truncate {
        l: usize,
    },
    /// XOR of all bits, as a 1-bit string.
    Parity,
    /// XOR of consecutive `l`-bit chunks taken from the MSB end; a short
    /// final chunk is padded with zeros on the right.
    XorFold {
        l: usize,
    },
    /// `(multiplier * v + addend) mod 2^l` on the item's unsigned value `v`.
    AffineMod {
        multiplier: u64,
        addend: u64,
        l: usize,
    },
}

impl F2Kind {
    pub fn name(&self) -> &'static str {
        match self {
            F2Kind::Identity => "identity",
            F2Kind::Truncate { .. } => "truncate",
            F2Kind::Parity => "parity",
            F2Kind::XorFold { .. } => "xor_fold",
            F2Kind::AffineMod { .. } => "affine_mod",
        }
    }

    /// Output width for items of width `item_width`.
    pub fn output_width(&self, item_width: usize) -> usize {
        match *self {
            F2Kind::Identity => item_width,
            F2Kind::Parity => 1,
            F2Kind::Truncate { l } | F2Kind::XorFold { l } | F2Kind::AffineMod { l, .. } => l,
        }
    }

    /// Checks that the transform is defined on items of width `item_width`.
    pub fn check_item_width(&self, item_width: usize) -> Result<()> {
        if item_width == 0 {
            return Err(Error::Format("items must be at least one bit wide".into()));
        }
        let l = self.output_width(item_width);
        if l == 0 || l > item_width {
            return Err(Error::Format(format!("{} output width {l} must lie in 1..={item_width}", self.name())));
        }
        if matches!(self, F2Kind::AffineMod { .. }) && l > 64 {
            return Err(Error::Format(format!("affine_mod output width {l} exceeds 64")));
        }
        Ok(())
    }

    pub fn apply(&self, item: &BitString) -> Result<BitString> {
        self.check_item_width(item.width())?;
        Ok(match *self {
            F2Kind::Identity => item.clone(),
            F2Kind::Truncate { l } => item.prefix(l),
            F2Kind::Parity => BitString::from_bits([item.count_ones() % 2 == 1]),
            F2Kind::XorFold { l } => {
                let mut out = BitString::zeros(l);
                for (i, bit) in item.iter().enumerate() {
                    if bit {
                        out.set(i % l, !out.get(i % l));
                    }
                }
                out
            }
            F2Kind::AffineMod { multiplier, addend, l } => {
                // Only v mod 2^64 matters for a result taken mod 2^l, l <= 64.
                let r = multiplier.wrapping_mul(item.low_u64()).wrapping_add(addend);
                BitString::from_u64(r, l)
            }
        })
    }
}

/// The search criteria: which transform to apply and the target it must hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    f2: F2Kind,
    z: BitString,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    f2: String,
    #[serde(default)]
    params: Map<String, Value>,
    z: String,
}

impl SearchSpec {
    /// Fixed-width transforms must produce exactly `z.width()` bits. The
    /// identity width is checked against the items in [`Instance::new`].
    pub fn new(f2: F2Kind, z: BitString) -> Result<Self> {
        if z.width() == 0 {
            return Err(Error::Format("target z must be at least one bit wide".into()));
        }
        if !matches!(f2, F2Kind::Identity) && f2.output_width(z.width()) != z.width() {
            return Err(Error::Format(format!(
                "{} produces {} bits but z has {}",
                f2.name(),
                f2.output_width(z.width()),
                z.width()
            )));
        }
        Ok(SearchSpec { f2, z })
    }

    pub fn f2(&self) -> F2Kind {
        self.f2
    }

    pub fn z(&self) -> &BitString {
        &self.z
    }

    /// Applies the transform to `item`; fails unless the result is as wide as `z`.
    pub fn apply_f2(&self, item: &BitString) -> Result<BitString> {
        let out = self.f2.apply(item)?;
        if out.width() != self.z.width() {
            return Err(Error::Format(format!(
                "{} maps {}-bit items to {} bits but z has {}",
                self.f2.name(),
                item.width(),
                out.width(),
                self.z.width()
            )));
        }
        Ok(out)
    }

    pub fn check_item_width(&self, item_width: usize) -> Result<()> {
        self.f2.check_item_width(item_width)?;
        let l = self.f2.output_width(item_width);
        if l != self.z.width() {
            return Err(Error::Format(format!(
                "{} maps {item_width}-bit items to {l} bits but z has {}",
                self.f2.name(),
                self.z.width()
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpecFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("spec file: {e}")))?;
        let params = Params { map: raw.params, f2: &raw.f2 };
        let f2 = match raw.f2.as_str() {
            "identity" => {
                params.expect_keys(&[])?;
                F2Kind::Identity
            }
            "parity" => {
                params.expect_keys(&[])?;
                F2Kind::Parity
            }
            "truncate" => {
                params.expect_keys(&["l"])?;
                F2Kind::Truncate { l: params.get("l")? as usize }
            }
            "xor_fold" => {
                params.expect_keys(&["l"])?;
                F2Kind::XorFold { l: params.get("l")? as usize }
            }
            "affine_mod" => {
                params.expect_keys(&["multiplier", "addend", "l"])?;
                F2Kind::AffineMod {
                    multiplier: params.get("multiplier")?,
                    addend: params.get("addend")?,
                    l: params.get("l")? as usize,
                }
            }
            other => return Err(Error::Format(format!("unknown f2 {other:?}"))),
        };
        SearchSpec::new(f2, raw.z.parse()?)
    }

    pub fn to_json(&self) -> String {
        let mut params = Map::new();
        match self.f2 {
            F2Kind::Identity | F2Kind::Parity => {}
            F2Kind::Truncate { l } | F2Kind::XorFold { l } => {
                params.insert("l".into(), l.into());
            }
            F2Kind::AffineMod { multiplier, addend, l } => {
                params.insert("multiplier".into(), multiplier.into());
                params.insert("addend".into(), addend.into());
                params.insert("l".into(), l.into());
            }
        }
        let file = SpecFile { f2: self.f2.name().into(), params, z: self.z.to_string() };
        serde_json::to_string_pretty(&file).expect("spec serialises")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        SearchSpec::from_json(&std::fs::read_to_string(path)?)
    }
}

struct Params<'a> {
    map: Map<String, Value>,
    f2: &'a str,
}

impl Params<'_> {
    fn expect_keys(&self, keys: &[&str]) -> Result<()> {
        if let Some(extra) = self.map.keys().find(|k| !keys.contains(&k.as_str())) {
            return Err(Error::Format(format!("unexpected parameter {extra:?} for {}", self.f2)));
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Result<u64> {
        self.map
            .get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Format(format!("{} needs a non-negative integer {key:?}", self.f2)))
    }
}

/// The unsorted list being searched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemList {
    item_width: usize,
    items: Vec<BitString>,
}

impl ItemList {
    pub fn new(item_width: usize, items: Vec<BitString>) -> Result<Self> {
        if item_width == 0 {
            return Err(Error::Format("item width must be positive".into()));
        }
        if let Some((i, bad)) = items.iter().enumerate().find(|(_, it)| it.width() != item_width) {
            return Err(Error::Format(format!("item {i} has {} bits, expected {item_width}", bad.width())));
        }
        if items.len() as u128 > 1u128 << MAX_MAGNITUDE_BITS {
            return Err(Error::Format("list too long".into()));
        }
        Ok(ItemList { item_width, items })
    }

    /// Parses the text format: the item width on the first line, then one
    /// item per non-empty line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).enumerate();
        let (_, header) =
            lines.find(|(_, l)| !l.is_empty()).ok_or_else(|| Error::Format("items file is empty".into()))?;
        let item_width: usize =
            header.parse().map_err(|_| Error::Format(format!("first line {header:?} is not an item width")))?;
        let items = lines
            .filter(|(_, l)| !l.is_empty())
            .map(|(no, l)| l.parse::<BitString>().map_err(|e| Error::Format(format!("line {}: {e}", no + 1))))
            .collect::<Result<Vec<_>>>()?;
        ItemList::new(item_width, items)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        ItemList::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.item_width);
        for item in &self.items {
            out.push_str(&item.to_string());
            out.push('\n');
        }
        out
    }

    pub fn item_width(&self) -> usize {
        self.item_width
    }

    pub fn items(&self) -> &[BitString] {
        &self.items
    }

    /// Number of loaded items, before padding.
    pub fn raw_len(&self) -> usize {
        self.items.len()
    }

    /// `n = ceil(log2 N_raw)`, at least 1.
    pub fn magnitude_bits(&self) -> u32 {
        let len = self.items.len().max(2) as u64;
        64 - (len - 1).leading_zeros()
    }

    /// Padded size `N = 2^n`.
    pub fn padded_len(&self) -> u64 {
        1 << self.magnitude_bits()
    }
}

/// A list together with validated search criteria.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    items: ItemList,
    spec: SearchSpec,
}

impl Instance {
    pub fn new(items: ItemList, spec: SearchSpec) -> Result<Self> {
        spec.check_item_width(items.item_width())?;
        Ok(Instance { items, spec })
    }

    pub fn items(&self) -> &ItemList {
        &self.items
    }

    pub fn spec(&self) -> &SearchSpec {
        &self.spec
    }

    pub fn magnitude_bits(&self) -> u32 {
        self.items.magnitude_bits()
    }

    /// The match predicate over padded positions; padding never matches.
    pub fn f1(&self, position: u64) -> Result<bool> {
        let n = self.magnitude_bits();
        if position >= 1 << n {
            return Err(Error::Range { position, magnitude_bits: n });
        }
        Ok(self.matches_unchecked(position))
    }

    fn matches_unchecked(&self, position: u64) -> bool {
        match self.items.items.get(position as usize) {
            // Widths were validated in `Instance::new`.
            Some(item) => self.spec.apply_f2(item).map(|v| v == self.spec.z).unwrap_or(false),
            None => false,
        }
    }

    /// The sign-extended predicate: `f1` on non-negative indices, 0 on
    /// every negative one (including `-0`).
    pub fn f3(&self, index: &SignedIndex) -> Result<bool> {
        let n = self.magnitude_bits();
        if index.magnitude_bits() != n {
            return Err(Error::Format(format!(
                "index {index} has {} magnitude bits, instance has {n}",
                index.magnitude_bits()
            )));
        }
        Ok(!index.is_negative() && self.matches_unchecked(index.magnitude_position()))
    }

    pub fn as_indexed_function(&self) -> SignExtended<'_> {
        SignExtended { instance: self }
    }
}

/// A deterministic black-box function from `(n + 1)`-bit signed indices to
/// bit strings.
///
/// Callers must pass indices of width [`input_width`](Self::input_width).
pub trait IndexedFunction {
    fn input_width(&self) -> usize;
    fn output_width(&self) -> usize;
    fn evaluate(&self, x: SignedIndex) -> BitString;
}

/// `f3` of an [`Instance`] viewed as a 1-bit black box.
#[derive(Debug, Clone, Copy)]
pub struct SignExtended<'a> {
    instance: &'a Instance,
}

impl SignExtended<'_> {
    pub fn instance(&self) -> &Instance {
        self.instance
    }
}

impl IndexedFunction for SignExtended<'_> {
    fn input_width(&self) -> usize {
        self.instance.magnitude_bits() as usize + 1
    }

    fn output_width(&self) -> usize {
        1
    }

    fn evaluate(&self, x: SignedIndex) -> BitString {
        debug_assert_eq!(x.width(), self.input_width());
        let hit = !x.is_negative() && self.instance.matches_unchecked(x.magnitude_position());
        BitString::from_bits([hit])
    }
}

/// A 1-bit function given by its full truth table, indexed by encoding.
#[derive(Clone, PartialEq, Eq)]
pub struct TruthTable {
    magnitude_bits: u32,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(magnitude_bits: u32, outputs: Vec<bool>) -> Result<Self> {
        check_table_width(magnitude_bits)?;
        if outputs.len() as u64 != 1 << (magnitude_bits + 1) {
            return Err(Error::Format(format!(
                "truth table over {} bits needs {} entries, got {}",
                magnitude_bits + 1,
                1u64 << (magnitude_bits + 1),
                outputs.len()
            )));
        }
        Ok(TruthTable { magnitude_bits, outputs })
    }

    pub fn from_fn(magnitude_bits: u32, f: impl FnMut(SignedIndex) -> bool) -> Result<Self> {
        check_table_width(magnitude_bits)?;
        let outputs = (0..1u64 << (magnitude_bits + 1))
            .map(|enc| SignedIndex::from_encoding(magnitude_bits, enc).expect("encoding in range"))
            .map(f)
            .collect();
        TruthTable::new(magnitude_bits, outputs)
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table: String = self.outputs.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "TruthTable(n={}, {table})", self.magnitude_bits)
    }
}

impl IndexedFunction for TruthTable {
    fn input_width(&self) -> usize {
        self.magnitude_bits as usize + 1
    }

    fn output_width(&self) -> usize {
        1
    }

    fn evaluate(&self, x: SignedIndex) -> BitString {
        BitString::from_bits([self.outputs[x.encoding() as usize]])
    }
}

fn check_table_width(magnitude_bits: u32) -> Result<()> {
    if magnitude_bits == 0 || magnitude_bits > MAX_GENERATED_MAGNITUDE_BITS {
        return Err(Error::Format(format!("truth table width {magnitude_bits} unsupported")));
    }
    Ok(())
}

/// Generates a `2^n`-item list whose matches under the identity transform
/// are exactly `planted`.
pub fn gen_instance(seed: u64, n: u32, m: usize, planted: &[u64]) -> Result<Instance> {
    gen_instance_with(seed, n, m, planted, F2Kind::Identity)
}

/// Generates a `2^n`-item list whose matches under `f2` are exactly `planted`.
///
/// A random target item is copied to every planted position and `z` is set
/// to its image; every other position is drawn at random until it misses `z`.
pub fn gen_instance_with(seed: u64, n: u32, m: usize, planted: &[u64], f2: F2Kind) -> Result<Instance> {
    if n == 0 || n > MAX_GENERATED_MAGNITUDE_BITS {
        return Err(Error::Generation(format!("n = {n} outside 1..={MAX_GENERATED_MAGNITUDE_BITS}")));
    }
    f2.check_item_width(m).map_err(|e| Error::Generation(e.to_string()))?;
    let size = 1u64 << n;
    if let Some(&bad) = planted.iter().find(|&&p| p >= size) {
        return Err(Error::Range { position: bad, magnitude_bits: n });
    }
    let planted: BTreeSet<u64> = planted.iter().copied().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| BitString::from_bits((0..m).map(|_| rng.gen::<bool>()));
    let target = draw(&mut rng);
    let z = f2.apply(&target)?;

    let mut items = Vec::with_capacity(size as usize);
    for p in 0..size {
        if planted.contains(&p) {
            items.push(target.clone());
            continue;
        }
        let filler = (0..MAX_FILL_ATTEMPTS)
            .map(|_| draw(&mut rng))
            .find(|item| f2.apply(item).map(|v| v != z).unwrap_or(false))
            .ok_or_else(|| {
                Error::Generation(format!(
                    "no non-matching {m}-bit item found for position {p} after {MAX_FILL_ATTEMPTS} draws"
                ))
            })?;
        items.push(filler);
    }
    Instance::new(ItemList::new(m, items)?, SearchSpec::new(f2, z)?)
}
