//! Explicit transport constructions: dyadic irrigation, sphere connections, cones
//! and the cheap transport between small sub-measures.

mod cone;
mod dyadic;
mod sphere;
mod subtransport;
mod wrap;

pub use cone::{cone_bound, cone_transport};
pub use dyadic::{dyadic_irrigation, Construction};
pub use sphere::{sphere_transport, sphere_transport_with, SphereConstruction, SEGMENTS_PER_CIRCLE};
pub use subtransport::{as_construction, cheap_subtransport, cheap_subtransport_with, collection_point, SubTransport, SubTransportOptions};
pub use wrap::SphereWrapMap;
