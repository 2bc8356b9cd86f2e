//! Randomized structural checks over the catalog: evolution and Reeb fields
//! of the Hamiltonian side and the pullback property of the discrete flow.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::discrete::{self, midpoint_discretize, DiscreteTriple};
use crate::error::Result;
use crate::geometry;
use crate::solve::NewtonConfig;
use crate::systems::ExampleSystem;

/// Largest defects over the sampled points, each divided by `1 + |field|`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeometryDefects {
    /// Flat-inverse against coordinate evolution field.
    pub evolution: f64,
    /// `η(E)`.
    pub eta_of_evolution: f64,
    /// `ι_R ω` and `η(R) - 1`.
    pub reeb: f64,
    /// Evolution field with contact friction against `Y_H`.
    pub contact: f64,
}

impl GeometryDefects {
    pub fn max(&self) -> f64 {
        self.evolution
            .max(self.eta_of_evolution)
            .max(self.reeb)
            .max(self.contact)
    }
}

pub fn geometry_check(sys: &dyn ExampleSystem, samples: usize, seed: u64) -> Result<GeometryDefects> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = GeometryDefects::default();
    for _ in 0..samples {
        let x = sys.sample_state(&mut rng);
        let pt = sys.hamiltonian_point(&x.q, &x.v, x.s);
        let st = geometry::assemble_structure(&pt)?;
        let e = geometry::evolution_field(&st, &pt)?;
        let e_coord = geometry::evolution_field_coordinates(&pt)?;
        let scale = 1.0 + e_coord.amax();
        out.evolution = out.evolution.max((&e - &e_coord).amax() / scale);
        out.eta_of_evolution = out
            .eta_of_evolution
            .max(st.eta().dot(&e).abs() / (scale * (1.0 + st.eta().amax())));
        let r = st.reeb_field()?;
        out.reeb = out
            .reeb
            .max(st.contract(&r).amax() / (1.0 + r.amax()))
            .max((st.eta().dot(&r) - 1.0).abs());
        let mut contact_pt = pt.clone();
        contact_pt.friction = geometry::contact_friction(&pt.p, &pt.dh);
        let contact_st = geometry::assemble_structure(&contact_pt)?;
        let y = geometry::contact_evolution_field(&pt.p, &pt.dh);
        let ce = geometry::evolution_field(&contact_st, &contact_pt)?;
        out.contact = out.contact.max((&ce - &y).amax() / (1.0 + y.amax()));
    }
    Ok(out)
}

/// Largest pullback defect `‖Jᵀ Ω⁻ J - Ω⁺‖` over random triples
/// `(q, q + h v, S)` drawn from the system's sampling domain.
pub fn pullback_sweep(sys: &dyn ExampleSystem, h: f64, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = midpoint_discretize(sys, h)?;
    let cfg = NewtonConfig::default();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = sys.sample_state(&mut rng);
        let t = DiscreteTriple::new(x.q.clone(), &x.q + &x.v * h, x.s);
        worst = worst.max(discrete::pullback_check(&d, &t, &cfg)?);
    }
    Ok(worst)
}
