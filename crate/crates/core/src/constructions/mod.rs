//! The two literature constructions of optimal doubling codes over GF(2):
//! point-hyperplane shortening of a lifted Gabidulin code (HKK), and the
//! orbit construction under an order-6 matrix group (CPS).

mod cps;
mod gabidulin;
mod hkk;
mod matrix;

use thiserror::Error;

use crate::doubling::DoublingError;
use crate::gf2geom::GeomError;
use crate::spread::SpreadError;

pub use cps::{
    cps_assemble, cps_build, cps_config_from_record, cps_for_each, cps_group, cps_matrix, cps_orbits, cps_regulus_check, cps_report,
    verify_group, CpsConfig, CpsOrbits, CpsOutput, CpsRecord, CpsReport, CpsVariant, ReplacedPlane, CPS_PARAMETERS,
};
pub use gabidulin::{build_lifted_gabidulin, gf8_mul, lift, linearized_matrix, rank_distance, LiftedGabidulinCode};
pub use hkk::{
    hkk_build, hkk_for_each, hkk_pattern_check, recoordinatize, shorten, HkkConfig, HkkOutput, HkkPatternReport, HkkRecord, HkkSearch,
    HkkStats,
};
pub use matrix::Gf2Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Spread(#[from] SpreadError),
    #[error(transparent)]
    Doubling(#[from] DoublingError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("shortening point lies in the hyperplane")]
    PointInHyperplane,
    #[error("configuration does not yield a doubling code")]
    NotDoubling,
    #[error("matrices do not form a group: {0}")]
    NotAGroup(String),
}
