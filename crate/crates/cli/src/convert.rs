//! JSON renderings of library values. Scalars are always strings.

use finmet::genericity::{BlockSpace, Perturbation, RichnessReport, SingularWitness};
use finmet::io::{metric_json, scalar_json};
use finmet::scalar::format_float;
use finmet::transmissible::{Cycl0Outcome, DefectReport, DoublingQ, ModulusReport, Witness};
use finmet::{Metric, Rational};
use serde_json::{json, Value};

pub trait ToJson {
    fn to_json(&self) -> Value;
}

impl ToJson for Rational {
    fn to_json(&self) -> Value {
        scalar_json(self)
    }
}

impl ToJson for () {
    fn to_json(&self) -> Value {
        Value::Null
    }
}

impl ToJson for f64 {
    fn to_json(&self) -> Value {
        Value::String(format_float(*self))
    }
}

impl ToJson for DoublingQ<Rational> {
    fn to_json(&self) -> Value {
        json!({ "C": self.c.to_json(), "alpha": self.alpha.to_string() })
    }
}

/// Doubling values: subset size and spread ratio.
impl ToJson for (usize, Rational) {
    fn to_json(&self) -> Value {
        json!({ "card": self.0, "ratio": self.1.to_json() })
    }
}

/// Chain values: largest gap and endpoint distance.
impl ToJson for (Rational, Rational) {
    fn to_json(&self) -> Value {
        json!({ "gap": self.0.to_json(), "span": self.1.to_json() })
    }
}

/// Richness indices: target and precision exponent.
impl ToJson for (usize, u32) {
    fn to_json(&self) -> Value {
        json!({ "target": self.0, "m": self.1 })
    }
}

impl ToJson for Metric {
    fn to_json(&self) -> Value {
        metric_json(self)
    }
}

impl<Q: ToJson, Z: ToJson, P: ToJson> ToJson for Witness<Q, Z, P> {
    fn to_json(&self) -> Value {
        json!({
            "q": self.q.to_json(),
            "z": self.z.to_json(),
            "tuple": self.tuple,
            "value": self.value.to_json(),
        })
    }
}

impl ToJson for DefectReport<Rational> {
    fn to_json(&self) -> Value {
        json!({
            "property": self.property,
            "defect": self.defect.to_json(),
            "witness": self.witness,
            "exhaustive": self.exhaustive,
            "violated": self.violated(),
        })
    }
}

impl ToJson for ModulusReport<Rational> {
    fn to_json(&self) -> Value {
        json!({
            "property": "uniformly-disconnected",
            "modulus": self.modulus.to_json(),
            "chain": self.chain,
            "exhaustive": self.exhaustive,
        })
    }
}

fn points_json(points: &[[f64; 2]]) -> Value {
    points.iter().map(|p| json!([p[0].to_json(), p[1].to_json()])).collect()
}

impl ToJson for Cycl0Outcome {
    fn to_json(&self) -> Value {
        json!({
            "feasible": self.is_feasible(),
            "min_slack": self.min_slack().to_json(),
            "points": points_json(self.points()),
        })
    }
}

impl<Q: ToJson, Z: ToJson> ToJson for SingularWitness<Rational, Q, Z> {
    fn to_json(&self) -> Value {
        json!({
            "param": self.param,
            "q": self.q.to_json(),
            "z": self.z.to_json(),
            "space": self.space.to_json(),
            "tuple": self.tuple,
        })
    }
}

impl<Q: ToJson, Z: ToJson, P: ToJson> ToJson for BlockSpace<Rational, Q, Z, P> {
    fn to_json(&self) -> Value {
        let blocks: Vec<&[String]> = self.blocks.iter().map(|b| b.labels()).collect();
        json!({
            "epsilon": self.epsilon.to_json(),
            "hub": self.hub,
            "blocks": blocks,
            "metric": self.metric.to_json(),
            "witnesses": self.witnesses.iter().map(ToJson::to_json).collect::<Vec<_>>(),
        })
    }
}

impl<Q: ToJson, Z: ToJson, P: ToJson> ToJson for Perturbation<Rational, Q, Z, P> {
    fn to_json(&self) -> Value {
        json!({
            "metric": self.m.to_json(),
            "cluster": self.cluster,
            "eta": self.eta.to_json(),
            "witness": self.witness.to_json(),
        })
    }
}

impl ToJson for RichnessReport<Rational> {
    fn to_json(&self) -> Value {
        json!({
            "found": self.found,
            "matched": self.matched,
            "z": self.z.to_json(),
            "distortion": self.distortion.to_json(),
            "subsets_scanned": self.subsets_scanned,
            "exhaustive": self.exhaustive,
        })
    }
}
