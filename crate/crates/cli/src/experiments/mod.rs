//! Registry of named experiments.

mod euler;
mod interval;
mod transport;

use serde::Serialize;

use crate::params::{ParamSpec, Params};
use crate::report::Recorder;

pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub paper_anchor: &'static str,
    pub params: fn() -> Vec<ParamSpec>,
    pub run: fn(&Params, &mut Recorder) -> skewlab::Result<()>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub paper_anchor: &'static str,
}

static REGISTRY: [Experiment; 10] = [
    Experiment {
        name: "remark3",
        summary: "half-sum of the periodic and antiperiodic shift groups vanishes at t = 1 and returns at t = 2",
        paper_anchor: "Remark 3",
        params: interval::remark3_params,
        run: interval::remark3,
    },
    Experiment {
        name: "interval-deficiency",
        summary: "deficiency indices (1, 1) of d/dx with zero boundary values on [0, 1]",
        paper_anchor: "Remark 3",
        params: interval::deficiency_params,
        run: interval::deficiency,
    },
    Experiment {
        name: "nonuniqueness-interval",
        summary: "weak residual of the growing solution e^(t - x) and the periodic shift from the same datum",
        paper_anchor: "Theorem 4",
        params: interval::nonuniqueness_params,
        run: interval::nonuniqueness,
    },
    Experiment {
        name: "cayley-roundtrip",
        summary: "Cayley transform and exp(tA) of random skew matrices are orthogonal; inverse transform round trip",
        paper_anchor: "Theorem 2",
        params: interval::cayley_params,
        run: interval::cayley_roundtrip,
    },
    Experiment {
        name: "transport-rotation",
        summary: "rotation field: closed-form characteristics, orthogonal transport group on the torus grid",
        paper_anchor: "Section 4.1",
        params: transport::rotation_params,
        run: transport::rotation,
    },
    Experiment {
        name: "transport-resolvent",
        summary: "resolvent integral along backward characteristics solves phi + h a . grad phi = psi",
        paper_anchor: "Lemma lm1",
        params: transport::resolvent_params,
        run: transport::resolvent,
    },
    Experiment {
        name: "transport-decay",
        summary: "power-law decay exponent of the resolvent for a linearly growing field",
        paper_anchor: "Lemma lm1",
        params: transport::decay_params,
        run: transport::decay,
    },
    Experiment {
        name: "euler-projector",
        summary: "Leray projector algebra and the pressure-gradient operator T on the spectral torus",
        paper_anchor: "Section 4.2",
        params: euler::projector_params,
        run: euler::projector,
    },
    Experiment {
        name: "euler-evolve",
        summary: "RK4 evolution of the linearized Euler system: translation, conservation, fourth-order drift",
        paper_anchor: "Section 4.2",
        params: euler::evolve_params,
        run: euler::evolution,
    },
    Experiment {
        name: "euler-resolvent-lemma2",
        summary: "u - h(B + T)u = v by GMRES: solenoidal, contractive solution",
        paper_anchor: "Lemma lm2",
        params: euler::lemma2_params,
        run: euler::lemma2,
    },
];

pub fn registry() -> &'static [Experiment] {
    &REGISTRY
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

pub fn list_experiments() -> Vec<ExperimentInfo> {
    REGISTRY
        .iter()
        .map(|e| ExperimentInfo { name: e.name, summary: e.summary, paper_anchor: e.paper_anchor })
        .collect()
}
