pub mod bases;
pub mod catalog;
pub mod error;
pub mod expansion;
pub mod freezing;
pub mod report;
pub mod ring;
pub mod scattering;
pub mod seed;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use ring::{LatticeVec, Laurent, PStar, PointedElement, SkewForm, VCoeff};
pub use seed::{Seed, Sign};
pub use expansion::{Expander, ExchangeGraph, SeedState};
pub use freezing::{FreezeSpec, Freezer};
pub use report::{Report, Status};
pub use scattering::{Chamber, ScatteringDiagram, Wall, WallFunction};
