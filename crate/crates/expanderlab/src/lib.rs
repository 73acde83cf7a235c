//! expanderlab: a numerical laboratory for rotationally symmetric,
//! asymptotically conical self-expanders of mean curvature flow.
//!
//! The crate computes expander profiles by ODE shooting, reproduces them
//! independently by running graphical mean curvature flow from mollified
//! cones, evaluates Gaussian surface areas and entropies with certified
//! quadrature tails, and verifies the quantitative structure of these
//! surfaces at desk scale: curvature-ratio bounds, drift-Laplacian
//! identities, asymptotic decay, area ratios, and the continuity and
//! properness behavior of the cone-to-expander map.

pub mod analysis;
pub mod cone;
pub mod entropy;
pub mod error;
pub mod expander;
pub mod experiments;
pub mod fd;
pub mod flow;
pub mod grid;
pub mod link;
pub mod norms;
pub mod ode;
pub mod profile;
pub mod quad;
pub mod simplex;

mod par;

pub use cone::ConeSpec;
pub use error::{Error, Result};
pub use grid::{make_radial_grid, RadialGrid};
pub use profile::{cone_profile, Profile, ProfileEnvelope};
