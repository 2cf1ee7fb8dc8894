use serde_json::{json, Map, Value};

use crate::cmap::{CmapOutput, CmapType, DegeneracyReport, EscalationStep};
use crate::maniplab::ManipulationWitness;
use crate::model::{Allocation, Amount, Rational, Representation, TypeProfile, Valuation, MICROS_PER_UNIT};
use crate::payments::MechanismOutcome;
use crate::second_chance::SecondChanceRun;
use crate::wd::ReasonablenessWitness;

/// An amount in both micro-units and decimal units.
pub fn money(a: Amount) -> Value {
    json!({ "micros": a.micros(), "units": a.to_decimal_string() })
}

/// Exact rational, plus its decimal expansion when it terminates.
pub fn rational(r: &Rational) -> Value {
    let mut out = Map::new();
    out.insert("exact".into(), Value::String(r.to_string()));
    let mut den = *r.denom();
    let mut digits = 0usize;
    for p in [2, 5] {
        while den % p == 0 {
            den /= p;
        }
    }
    if den == 1 {
        let mut scaled = *r;
        while !scaled.is_integer() {
            scaled *= Rational::from_integer(10);
            digits += 1;
        }
        let n = scaled.to_integer();
        let sign = if n < 0 { "-" } else { "" };
        let body = n.unsigned_abs().to_string();
        let text = if digits == 0 {
            format!("{sign}{body}")
        } else {
            let padded = format!("{body:0>width$}", width = digits + 1);
            let (int, frac) = padded.split_at(padded.len() - digits);
            format!("{sign}{int}.{frac}")
        };
        out.insert("decimal".into(), Value::String(text));
    }
    Value::Object(out)
}

/// A rational number of micro-units, shown like [`money`] when whole.
pub fn micro_rational(r: &Rational) -> Value {
    match r.is_integer() && i64::try_from(r.to_integer()).is_ok() {
        true => money(Amount::from_micros(r.to_integer() as i64)),
        false => {
            let units = r / Rational::from_integer(i128::from(MICROS_PER_UNIT));
            json!({ "micros": rational(r), "units": rational(&units) })
        }
    }
}

fn units(a: Amount) -> Value {
    Value::String(a.to_decimal_string())
}

/// The valuation in input schema, amounts as decimal strings.
pub fn valuation(v: &Valuation, items: usize) -> Value {
    match v.representation() {
        Representation::Table { .. } => {
            let values: Map<String, Value> = v
                .to_table(items)
                .iter()
                .enumerate()
                .skip(1)
                .map(|(mask, x)| (mask.to_string(), units(*x)))
                .collect();
            json!({ "kind": "table", "values": values })
        }
        Representation::SingleMinded { bundle, value } => {
            json!({ "kind": "single_minded", "bundle": bundle.bits(), "value": units(*value) })
        }
        Representation::Additive { values } => {
            json!({ "kind": "additive", "values": values.iter().map(|x| units(*x)).collect::<Vec<_>>() })
        }
        Representation::Xor { bids } => json!({
            "kind": "xor",
            "bids": bids.iter().map(|(b, x)| json!({ "bundle": b.bits(), "value": units(*x) })).collect::<Vec<_>>(),
        }),
    }
}

pub fn profile(p: &TypeProfile, names: &[String]) -> Value {
    json!({
        "items": p.items(),
        "agents": p.valuations().iter().enumerate().map(|(i, v)| json!({
            "name": name(names, i),
            "valuation": valuation(v, p.items()),
        })).collect::<Vec<_>>(),
    })
}

fn name(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("agent{i}"))
}

/// Per-agent bundle bitmasks.
pub fn allocation(a: &Allocation) -> Value {
    Value::Array(a.bundles().iter().map(|b| Value::from(b.bits())).collect())
}

pub fn outcome(o: &MechanismOutcome, names: &[String]) -> Value {
    json!({
        "allocation": allocation(&o.allocation),
        "winner": o.winner().map(|w| name(names, w)),
        "agents": (0..o.allocation.agents()).map(|i| json!({
            "name": name(names, i),
            "bundle": o.allocation.bundle(i).bits(),
            "payment": money(o.payments[i]),
            "utility": money(o.utilities[i]),
        })).collect::<Vec<_>>(),
    })
}

pub fn second_chance(run: &SecondChanceRun, names: &[String]) -> Value {
    json!({
        "outcome": outcome(&run.outcome, names),
        "chosen_candidate": run.chosen,
        "candidates": run.candidates.iter().map(|c| json!({
            "appealed_by": c.appealed_by.map(|i| name(names, i)),
            "allocation": allocation(&c.allocation),
            "declared_welfare": money(c.declared_welfare),
        })).collect::<Vec<_>>(),
        "appeals": run.appeals.iter().map(|r| json!({
            "agent": name(names, r.agent),
            "status": r.status,
            "steps": r.steps,
        })).collect::<Vec<_>>(),
    })
}

pub fn witness(w: &ManipulationWitness, names: &[String]) -> Value {
    let m = w.profile.items();
    json!({
        "agent": name(names, w.agent),
        "true_type": valuation(&w.true_type, m),
        "profile": profile(&w.profile, names),
        "deviation": valuation(&w.deviation, m),
        "truthful_utility": micro_rational(&w.truthful_utility),
        "deviating_utility": micro_rational(&w.deviating_utility),
        "gain": micro_rational(&w.gain),
    })
}

pub fn reasonableness(w: &ReasonablenessWitness, names: &[String]) -> Value {
    json!({
        "item": w.item,
        "agent": name(names, w.agent),
        "allocation": allocation(&w.allocation),
        "profile": profile(&w.profile, names),
    })
}

pub fn cmap_output(x: &CmapOutput, layout: &[usize]) -> Value {
    let mut bits = x.bits().iter().map(|&b| u8::from(b));
    Value::Array(layout.iter().map(|&k| Value::from(bits.by_ref().take(k).collect::<Vec<u8>>())).collect())
}

pub fn cmap_type(v: &CmapType) -> Value {
    Value::Array(v.values().iter().map(|row| Value::Array(row.iter().map(|x| units(*x)).collect())).collect())
}

pub fn degeneracy(r: &DegeneracyReport, layout: &[usize]) -> Value {
    json!({
        "optimal": cmap_output(&r.optimal, layout),
        "produced": cmap_output(&r.produced, layout),
        "optimal_welfare": money(r.optimal_welfare),
        "produced_welfare": money(r.produced_welfare),
        "ratio": rational(&r.ratio),
        "ratio_as_printed": rational(&r.printed_ratio),
    })
}

pub fn escalation(steps: &[EscalationStep], layout: &[usize]) -> Value {
    Value::Array(
        steps
            .iter()
            .map(|s| {
                let mut row = degeneracy(&s.report, layout);
                row["alpha"] = money(s.alpha);
                row["forced_type"] = cmap_type(&s.forced_type);
                row
            })
            .collect(),
    )
}
