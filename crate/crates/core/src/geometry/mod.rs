//! Points, balls, ball regions and coverings.

mod ball;
mod cover;
mod point;

pub use ball::{Ball, BallRegion, Combinator, SPHERE_TOL};
pub use cover::{cover_compact, cover_null_set, packing_bound, COVER_METHOD};
pub use point::{project_to_ball, Point};
