//! Massless little-group models and induced representations.

pub mod cone;
pub mod e2;
pub mod lorentz;

pub use cone::{AngularInterp, ConeGrid23, MasslessRep23};
pub use e2::{e2_boost_conjugation, vk_dilation_rescale, vk_translation_spectrum, CircleRepVk, E2Element};
pub use lorentz::{little_group_decompose, Poincare};
