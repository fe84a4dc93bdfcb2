//! TOML model descriptions.
//!
//! A model file declares `format_version = 1`, a `family` (`"hopfield"`,
//! `"bam"`, or `"high-order"`), a `[dimensions]` block, and arrays of tables
//! for the coefficient grids. Grid entries address cells with 1-based index
//! keys; an omitted key is a wildcard over that axis, and later entries
//! override earlier ones, so broad defaults can be declared first and
//! refined afterwards. Omitted cells default to zero weights/inputs/leakage,
//! zero delays, and `tanh` activations.
//!
//! Index keys per family:
//!
//! * hopfield: `leakage`/`input` use `channel`; `weight`, `delay`,
//!   `activation` use `i` (receiving channel), `j` (source channel), `k`
//!   (term);
//! * bam: `x_*`/`y_*` vectors use `channel`; the coupling grids `x_instant`,
//!   `x_delayed`, `x_delay` and their `y_` counterparts use `i` (x channel)
//!   and `j` (y channel); `f_activation` (applied to y) and `g_activation`
//!   (applied to x) use `channel`;
//! * high-order: `leakage`/`input`/`f_activation`/`g_activation` use
//!   `channel`; `first_weight`/`first_delay` use `i`, `j`; the second-order
//!   grids `second_weight`, `second_delay_left`, `second_delay_right` use
//!   `i`, `j`, `l`.
//!
//! Numeric values may be integers, floats (taken at their exact binary
//! value), or strings parsed as exact rationals (`"1/12"`, `"-0.25"`).
//! Coefficient streams are tagged by `kind`: `"const"` (field `value`),
//! `"table"` (field `values`), `"cos"`/`"sin"` (fields `amplitude`,
//! `period`), `"alt"` (fields `base`, `delta`; value `base + delta` at even
//! steps, `base - delta` at odd ones). Activations are tagged by `name`:
//! `"tanh"`, `"arctan"`, `"sat-linear"`, or `"table"` with `nodes = [[x, y],
//! ...]`. A declared `dimensions.period` is cross-checked: it must be a
//! multiple of the least common multiple of all stream periods.

use super::bam::BamLayers;
use super::high_order::HighOrderParts;
use super::{
    Activation, BamSpec, DelayDescriptor, Descriptor, HighOrderSpec, HopfieldSpec, ModelError,
    ModelSpec, PiecewiseLinear,
};
use crate::rational::{parse_rat, rat_int, Rat};
use num_rational::BigRational;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    format_version: u32,
    family: String,
    dimensions: RawDimensions,
    #[serde(default)]
    leakage: Vec<RawEntry>,
    #[serde(default)]
    weight: Vec<RawEntry>,
    #[serde(default)]
    delay: Vec<RawEntry>,
    #[serde(default)]
    activation: Vec<RawActivation>,
    #[serde(default)]
    input: Vec<RawEntry>,
    #[serde(default)]
    x_leakage: Vec<RawEntry>,
    #[serde(default)]
    y_leakage: Vec<RawEntry>,
    #[serde(default)]
    x_instant: Vec<RawEntry>,
    #[serde(default)]
    x_delayed: Vec<RawEntry>,
    #[serde(default)]
    x_delay: Vec<RawEntry>,
    #[serde(default)]
    x_input: Vec<RawEntry>,
    #[serde(default)]
    y_instant: Vec<RawEntry>,
    #[serde(default)]
    y_delayed: Vec<RawEntry>,
    #[serde(default)]
    y_delay: Vec<RawEntry>,
    #[serde(default)]
    y_input: Vec<RawEntry>,
    #[serde(default)]
    f_activation: Vec<RawActivation>,
    #[serde(default)]
    g_activation: Vec<RawActivation>,
    #[serde(default)]
    first_weight: Vec<RawEntry>,
    #[serde(default)]
    first_delay: Vec<RawEntry>,
    #[serde(default)]
    second_weight: Vec<RawEntry>,
    #[serde(default)]
    second_delay_left: Vec<RawEntry>,
    #[serde(default)]
    second_delay_right: Vec<RawEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDimensions {
    #[serde(default)]
    channels: Option<u32>,
    #[serde(default)]
    terms: Option<u32>,
    #[serde(default)]
    x_channels: Option<u32>,
    #[serde(default)]
    y_channels: Option<u32>,
    leakage_delay: u32,
    #[serde(default)]
    period: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    #[serde(default)]
    channel: Option<u32>,
    #[serde(default)]
    i: Option<u32>,
    #[serde(default)]
    j: Option<u32>,
    #[serde(default)]
    k: Option<u32>,
    #[serde(default)]
    l: Option<u32>,
    kind: String,
    #[serde(default)]
    value: Option<toml::Value>,
    #[serde(default)]
    values: Option<Vec<toml::Value>>,
    #[serde(default)]
    amplitude: Option<toml::Value>,
    #[serde(default)]
    base: Option<toml::Value>,
    #[serde(default)]
    delta: Option<toml::Value>,
    #[serde(default)]
    period: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawActivation {
    #[serde(default)]
    channel: Option<u32>,
    #[serde(default)]
    i: Option<u32>,
    #[serde(default)]
    j: Option<u32>,
    #[serde(default)]
    k: Option<u32>,
    #[serde(default)]
    l: Option<u32>,
    name: String,
    #[serde(default)]
    nodes: Option<Vec<(toml::Value, toml::Value)>>,
}

/// Parses a TOML model description.
pub fn parse_model(text: &str) -> Result<ModelSpec, ModelError> {
    let raw: RawModel = toml::from_str(text).map_err(|e| {
        let offset = e
            .span()
            .map(|s| format!(" (byte offset {})", s.start))
            .unwrap_or_default();
        ModelError::Config(format!("{e}{offset}"))
    })?;
    if raw.format_version != 1 {
        return Err(ModelError::Config(format!(
            "unsupported format_version {} (expected 1)",
            raw.format_version
        )));
    }
    let spec = match raw.family.as_str() {
        "hopfield" => ModelSpec::Hopfield(hopfield_from(&raw)?),
        "bam" => ModelSpec::Bam(bam_from(&raw)?),
        "high-order" => ModelSpec::HighOrder(high_order_from(&raw)?),
        other => {
            return Err(ModelError::Config(format!(
                "unknown family {other:?} (expected \"hopfield\", \"bam\", or \"high-order\")"
            )))
        }
    };
    if let Some(declared) = raw.dimensions.period {
        let computed = spec.period();
        if declared == 0 || declared % computed != 0 {
            return Err(ModelError::Config(format!(
                "declared period {declared} is not a positive multiple of the \
                 combined stream period {computed}"
            )));
        }
    }
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    Channel,
    I,
    J,
    K,
    L,
}

impl Key {
    fn name(self) -> &'static str {
        match self {
            Key::Channel => "channel",
            Key::I => "i",
            Key::J => "j",
            Key::K => "k",
            Key::L => "l",
        }
    }
}

const ALL_KEYS: [Key; 5] = [Key::Channel, Key::I, Key::J, Key::K, Key::L];

trait Indexed {
    fn index(&self, key: Key) -> Option<u32>;
}

impl Indexed for RawEntry {
    fn index(&self, key: Key) -> Option<u32> {
        match key {
            Key::Channel => self.channel,
            Key::I => self.i,
            Key::J => self.j,
            Key::K => self.k,
            Key::L => self.l,
        }
    }
}

impl Indexed for RawActivation {
    fn index(&self, key: Key) -> Option<u32> {
        match key {
            Key::Channel => self.channel,
            Key::I => self.i,
            Key::J => self.j,
            Key::K => self.k,
            Key::L => self.l,
        }
    }
}

fn check_allowed<T: Indexed>(entry: &T, allowed: &[Key], what: &str) -> Result<(), ModelError> {
    for key in ALL_KEYS {
        if entry.index(key).is_some() && !allowed.contains(&key) {
            return Err(ModelError::Config(format!(
                "{what}: index key `{}` does not apply here",
                key.name()
            )));
        }
    }
    Ok(())
}

/// 1-based index to 0-based slot; `None` (omitted) selects the whole axis.
fn resolve(raw: Option<u32>, n: usize, what: &str, key: Key) -> Result<Option<usize>, ModelError> {
    match raw {
        None => Ok(None),
        Some(0) => Err(ModelError::Config(format!(
            "{what}: `{}` is 1-based; got 0",
            key.name()
        ))),
        Some(v) if (v as usize) <= n => Ok(Some(v as usize - 1)),
        Some(v) => Err(ModelError::Config(format!(
            "{what}: `{}` = {v} out of range 1..={n}",
            key.name()
        ))),
    }
}

fn fill1<T: Indexed, V: Clone>(
    n: usize,
    entries: &[T],
    what: &str,
    key: Key,
    parse: impl Fn(&T) -> Result<V, ModelError>,
    default: V,
) -> Result<Vec<V>, ModelError> {
    let mut out = vec![default; n];
    for entry in entries {
        check_allowed(entry, &[key], what)?;
        let value = parse(entry)?;
        match resolve(entry.index(key), n, what, key)? {
            Some(idx) => out[idx] = value,
            None => out.iter_mut().for_each(|slot| *slot = value.clone()),
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill2<T: Indexed, V: Clone>(
    rows: usize,
    cols: usize,
    entries: &[T],
    what: &str,
    row_key: Key,
    col_key: Key,
    parse: impl Fn(&T) -> Result<V, ModelError>,
    default: V,
) -> Result<Vec<Vec<V>>, ModelError> {
    let mut out = vec![vec![default; cols]; rows];
    for entry in entries {
        check_allowed(entry, &[row_key, col_key], what)?;
        let value = parse(entry)?;
        let r = resolve(entry.index(row_key), rows, what, row_key)?;
        let c = resolve(entry.index(col_key), cols, what, col_key)?;
        for ri in r.map_or(0..rows, |x| x..x + 1) {
            for ci in c.map_or(0..cols, |x| x..x + 1) {
                out[ri][ci] = value.clone();
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fill3<T: Indexed, V: Clone>(
    d0: usize,
    d1: usize,
    d2: usize,
    entries: &[T],
    what: &str,
    keys: (Key, Key, Key),
    parse: impl Fn(&T) -> Result<V, ModelError>,
    default: V,
) -> Result<Vec<Vec<Vec<V>>>, ModelError> {
    let mut out = vec![vec![vec![default; d2]; d1]; d0];
    for entry in entries {
        check_allowed(entry, &[keys.0, keys.1, keys.2], what)?;
        let value = parse(entry)?;
        let a = resolve(entry.index(keys.0), d0, what, keys.0)?;
        let b = resolve(entry.index(keys.1), d1, what, keys.1)?;
        let c = resolve(entry.index(keys.2), d2, what, keys.2)?;
        for ai in a.map_or(0..d0, |x| x..x + 1) {
            for bi in b.map_or(0..d1, |x| x..x + 1) {
                for ci in c.map_or(0..d2, |x| x..x + 1) {
                    out[ai][bi][ci] = value.clone();
                }
            }
        }
    }
    Ok(out)
}

fn to_rat(v: &toml::Value, what: &str) -> Result<Rat, ModelError> {
    match v {
        toml::Value::Integer(n) => Ok(rat_int(*n)),
        toml::Value::Float(f) => BigRational::from_float(*f)
            .ok_or_else(|| ModelError::Config(format!("{what}: non-finite float"))),
        toml::Value::String(s) => {
            parse_rat(s).map_err(|e| ModelError::Config(format!("{what}: bad rational {s:?}: {e}")))
        }
        other => Err(ModelError::Config(format!(
            "{what}: expected a number or rational string, got {other}"
        ))),
    }
}

fn field<'a>(
    v: &'a Option<toml::Value>,
    name: &str,
    what: &str,
) -> Result<&'a toml::Value, ModelError> {
    v.as_ref()
        .ok_or_else(|| ModelError::Config(format!("{what}: kind requires field `{name}`")))
}

fn no_field<T>(v: &Option<T>, name: &str, what: &str, kind: &str) -> Result<(), ModelError> {
    if v.is_some() {
        return Err(ModelError::Config(format!(
            "{what}: field `{name}` does not apply to kind {kind:?}"
        )));
    }
    Ok(())
}

fn descriptor_from(entry: &RawEntry, what: &str) -> Result<Descriptor, ModelError> {
    let kind = entry.kind.as_str();
    let desc = match kind {
        "const" => {
            no_field(&entry.values, "values", what, kind)?;
            no_field(&entry.amplitude, "amplitude", what, kind)?;
            no_field(&entry.base, "base", what, kind)?;
            no_field(&entry.delta, "delta", what, kind)?;
            no_field(&entry.period, "period", what, kind)?;
            Descriptor::Constant(to_rat(field(&entry.value, "value", what)?, what)?)
        }
        "table" => {
            no_field(&entry.value, "value", what, kind)?;
            no_field(&entry.amplitude, "amplitude", what, kind)?;
            no_field(&entry.base, "base", what, kind)?;
            no_field(&entry.delta, "delta", what, kind)?;
            no_field(&entry.period, "period", what, kind)?;
            let values = entry.values.as_ref().ok_or_else(|| {
                ModelError::Config(format!("{what}: kind \"table\" requires field `values`"))
            })?;
            Descriptor::Table(
                values
                    .iter()
                    .map(|v| to_rat(v, what))
                    .collect::<Result<_, _>>()?,
            )
        }
        "cos" | "sin" => {
            no_field(&entry.value, "value", what, kind)?;
            no_field(&entry.values, "values", what, kind)?;
            no_field(&entry.base, "base", what, kind)?;
            no_field(&entry.delta, "delta", what, kind)?;
            let amplitude = to_rat(field(&entry.amplitude, "amplitude", what)?, what)?;
            let period = entry.period.ok_or_else(|| {
                ModelError::Config(format!("{what}: kind {kind:?} requires field `period`"))
            })?;
            if kind == "cos" {
                Descriptor::Cosine { amplitude, period }
            } else {
                Descriptor::Sine { amplitude, period }
            }
        }
        "alt" => {
            no_field(&entry.value, "value", what, kind)?;
            no_field(&entry.values, "values", what, kind)?;
            no_field(&entry.amplitude, "amplitude", what, kind)?;
            no_field(&entry.period, "period", what, kind)?;
            Descriptor::Alternating {
                base: to_rat(field(&entry.base, "base", what)?, what)?,
                delta: to_rat(field(&entry.delta, "delta", what)?, what)?,
            }
        }
        other => {
            return Err(ModelError::Config(format!(
                "{what}: unknown kind {other:?} (expected \"const\", \"table\", \"cos\", \"sin\", or \"alt\")"
            )))
        }
    };
    desc.validate()?;
    Ok(desc)
}

fn delay_from(entry: &RawEntry, what: &str) -> Result<DelayDescriptor, ModelError> {
    DelayDescriptor::new(descriptor_from(entry, what)?)
}

fn activation_from(entry: &RawActivation, what: &str) -> Result<Activation, ModelError> {
    match entry.name.as_str() {
        "tanh" => Ok(Activation::Tanh),
        "arctan" => Ok(Activation::Arctan),
        "sat-linear" => Ok(Activation::SatLinear),
        "table" => {
            let nodes = entry.nodes.as_ref().ok_or_else(|| {
                ModelError::Config(format!("{what}: activation \"table\" requires `nodes`"))
            })?;
            let nodes = nodes
                .iter()
                .map(|(x, y)| Ok((to_rat(x, what)?, to_rat(y, what)?)))
                .collect::<Result<Vec<_>, ModelError>>()?;
            Ok(Activation::Table(PiecewiseLinear::new(nodes)?))
        }
        other => Err(ModelError::Config(format!(
            "{what}: unknown activation {other:?} (expected \"tanh\", \"arctan\", \"sat-linear\", or \"table\")"
        ))),
    }
}

fn need(v: Option<u32>, what: &str) -> Result<usize, ModelError> {
    let v = v.ok_or_else(|| ModelError::Config(format!("missing {what}")))? as usize;
    if v == 0 {
        return Err(ModelError::Config(format!("{what} must be at least 1")));
    }
    Ok(v)
}

/// Rejects tables that do not belong to the declared family.
fn reject_foreign_tables(raw: &RawModel, allowed: &[&str]) -> Result<(), ModelError> {
    let tables: [(&str, bool); 22] = [
        ("leakage", raw.leakage.is_empty()),
        ("weight", raw.weight.is_empty()),
        ("delay", raw.delay.is_empty()),
        ("activation", raw.activation.is_empty()),
        ("input", raw.input.is_empty()),
        ("x_leakage", raw.x_leakage.is_empty()),
        ("y_leakage", raw.y_leakage.is_empty()),
        ("x_instant", raw.x_instant.is_empty()),
        ("x_delayed", raw.x_delayed.is_empty()),
        ("x_delay", raw.x_delay.is_empty()),
        ("x_input", raw.x_input.is_empty()),
        ("y_instant", raw.y_instant.is_empty()),
        ("y_delayed", raw.y_delayed.is_empty()),
        ("y_delay", raw.y_delay.is_empty()),
        ("y_input", raw.y_input.is_empty()),
        ("f_activation", raw.f_activation.is_empty()),
        ("g_activation", raw.g_activation.is_empty()),
        ("first_weight", raw.first_weight.is_empty()),
        ("first_delay", raw.first_delay.is_empty()),
        ("second_weight", raw.second_weight.is_empty()),
        ("second_delay_left", raw.second_delay_left.is_empty()),
        ("second_delay_right", raw.second_delay_right.is_empty()),
    ];
    for (name, empty) in tables {
        if !empty && !allowed.contains(&name) {
            return Err(ModelError::Config(format!(
                "table `{name}` is not used by family {:?}",
                raw.family
            )));
        }
    }
    Ok(())
}

fn hopfield_from(raw: &RawModel) -> Result<HopfieldSpec, ModelError> {
    reject_foreign_tables(raw, &["leakage", "weight", "delay", "activation", "input"])?;
    let n = need(raw.dimensions.channels, "dimensions.channels")?;
    let terms = need(raw.dimensions.terms, "dimensions.terms")?;
    let ijk = (Key::I, Key::J, Key::K);
    HopfieldSpec::new(
        raw.dimensions.leakage_delay,
        fill1(
            n,
            &raw.leakage,
            "leakage",
            Key::Channel,
            |e| descriptor_from(e, "leakage"),
            Descriptor::zero(),
        )?,
        fill3(
            n,
            n,
            terms,
            &raw.weight,
            "weight",
            ijk,
            |e| descriptor_from(e, "weight"),
            Descriptor::zero(),
        )?,
        fill3(
            n,
            n,
            terms,
            &raw.delay,
            "delay",
            ijk,
            |e| delay_from(e, "delay"),
            DelayDescriptor::constant(0),
        )?,
        fill3(
            n,
            n,
            terms,
            &raw.activation,
            "activation",
            ijk,
            |e| activation_from(e, "activation"),
            Activation::Tanh,
        )?,
        fill1(
            n,
            &raw.input,
            "input",
            Key::Channel,
            |e| descriptor_from(e, "input"),
            Descriptor::zero(),
        )?,
    )
}

fn bam_from(raw: &RawModel) -> Result<BamSpec, ModelError> {
    reject_foreign_tables(
        raw,
        &[
            "x_leakage",
            "y_leakage",
            "x_instant",
            "x_delayed",
            "x_delay",
            "x_input",
            "y_instant",
            "y_delayed",
            "y_delay",
            "y_input",
            "f_activation",
            "g_activation",
        ],
    )?;
    let n1 = need(raw.dimensions.x_channels, "dimensions.x_channels")?;
    let n2 = need(raw.dimensions.y_channels, "dimensions.y_channels")?;
    let desc = |what: &'static str| move |e: &RawEntry| descriptor_from(e, what);
    let delay = |what: &'static str| move |e: &RawEntry| delay_from(e, what);
    BamSpec::new(BamLayers {
        leakage_delay: raw.dimensions.leakage_delay,
        x_leakage: fill1(
            n1,
            &raw.x_leakage,
            "x_leakage",
            Key::Channel,
            desc("x_leakage"),
            Descriptor::zero(),
        )?,
        y_leakage: fill1(
            n2,
            &raw.y_leakage,
            "y_leakage",
            Key::Channel,
            desc("y_leakage"),
            Descriptor::zero(),
        )?,
        x_instant: fill2(
            n1,
            n2,
            &raw.x_instant,
            "x_instant",
            Key::I,
            Key::J,
            desc("x_instant"),
            Descriptor::zero(),
        )?,
        x_delayed: fill2(
            n1,
            n2,
            &raw.x_delayed,
            "x_delayed",
            Key::I,
            Key::J,
            desc("x_delayed"),
            Descriptor::zero(),
        )?,
        x_delays: fill2(
            n1,
            n2,
            &raw.x_delay,
            "x_delay",
            Key::I,
            Key::J,
            delay("x_delay"),
            DelayDescriptor::constant(0),
        )?,
        x_inputs: fill1(
            n1,
            &raw.x_input,
            "x_input",
            Key::Channel,
            desc("x_input"),
            Descriptor::zero(),
        )?,
        y_instant: fill2(
            n2,
            n1,
            &raw.y_instant,
            "y_instant",
            Key::J,
            Key::I,
            desc("y_instant"),
            Descriptor::zero(),
        )?,
        y_delayed: fill2(
            n2,
            n1,
            &raw.y_delayed,
            "y_delayed",
            Key::J,
            Key::I,
            desc("y_delayed"),
            Descriptor::zero(),
        )?,
        y_delays: fill2(
            n2,
            n1,
            &raw.y_delay,
            "y_delay",
            Key::J,
            Key::I,
            delay("y_delay"),
            DelayDescriptor::constant(0),
        )?,
        y_inputs: fill1(
            n2,
            &raw.y_input,
            "y_input",
            Key::Channel,
            desc("y_input"),
            Descriptor::zero(),
        )?,
        f_activations: fill1(
            n2,
            &raw.f_activation,
            "f_activation",
            Key::Channel,
            |e| activation_from(e, "f_activation"),
            Activation::Tanh,
        )?,
        g_activations: fill1(
            n1,
            &raw.g_activation,
            "g_activation",
            Key::Channel,
            |e| activation_from(e, "g_activation"),
            Activation::Tanh,
        )?,
    })
}

fn high_order_from(raw: &RawModel) -> Result<HighOrderSpec, ModelError> {
    reject_foreign_tables(
        raw,
        &[
            "leakage",
            "input",
            "first_weight",
            "first_delay",
            "second_weight",
            "second_delay_left",
            "second_delay_right",
            "f_activation",
            "g_activation",
        ],
    )?;
    let n = need(raw.dimensions.channels, "dimensions.channels")?;
    let desc = |what: &'static str| move |e: &RawEntry| descriptor_from(e, what);
    let delay = |what: &'static str| move |e: &RawEntry| delay_from(e, what);
    let ijl = (Key::I, Key::J, Key::L);
    HighOrderSpec::new(HighOrderParts {
        leakage_delay: raw.dimensions.leakage_delay,
        leakage: fill1(
            n,
            &raw.leakage,
            "leakage",
            Key::Channel,
            desc("leakage"),
            Descriptor::zero(),
        )?,
        first_weights: fill2(
            n,
            n,
            &raw.first_weight,
            "first_weight",
            Key::I,
            Key::J,
            desc("first_weight"),
            Descriptor::zero(),
        )?,
        first_delays: fill2(
            n,
            n,
            &raw.first_delay,
            "first_delay",
            Key::I,
            Key::J,
            delay("first_delay"),
            DelayDescriptor::constant(0),
        )?,
        second_weights: fill3(
            n,
            n,
            n,
            &raw.second_weight,
            "second_weight",
            ijl,
            desc("second_weight"),
            Descriptor::zero(),
        )?,
        second_delays_left: fill3(
            n,
            n,
            n,
            &raw.second_delay_left,
            "second_delay_left",
            ijl,
            delay("second_delay_left"),
            DelayDescriptor::constant(0),
        )?,
        second_delays_right: fill3(
            n,
            n,
            n,
            &raw.second_delay_right,
            "second_delay_right",
            ijl,
            delay("second_delay_right"),
            DelayDescriptor::constant(0),
        )?,
        f_activations: fill1(
            n,
            &raw.f_activation,
            "f_activation",
            Key::Channel,
            |e| activation_from(e, "f_activation"),
            Activation::Tanh,
        )?,
        g_activations: fill1(
            n,
            &raw.g_activation,
            "g_activation",
            Key::Channel,
            |e| activation_from(e, "g_activation"),
            Activation::Tanh,
        )?,
        inputs: fill1(
            n,
            &raw.input,
            "input",
            Key::Channel,
            desc("input"),
            Descriptor::zero(),
        )?,
    })
}
