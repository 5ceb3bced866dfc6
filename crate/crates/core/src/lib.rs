//! Hurwitz systems of simple branched covers over closed surfaces, the braid
//! and handle moves acting on them, and tools to explore and certify their
//! orbits.

pub mod enumerate;
pub mod error;
pub mod free_group;
pub mod frobenius;
pub mod group;
pub mod moves;
pub mod orbit;
pub mod perm;
pub mod replay;
pub mod search;
pub mod system;

pub use enumerate::{enumerate_systems, random_system, Filter};
pub use error::{Error, Result};
pub use free_group::{EndoMap, Gen, Letter, Word};
pub use frobenius::{count_systems, ApproxCount, ExactCount};
pub use group::{GroupHandle, TransitivityClass};
pub use moves::canonical::{canonicalize, Mode, NormalizeOptions};
pub use moves::{Move, MoveSelector, MoveWord};
pub use orbit::{census, connect, orbit_bfs, Connection, OrbitCensus};
pub use perm::{BlockPartition, CycleType, Permutation};
pub use replay::{replay, Certificate};
pub use system::{HurwitzSystem, SystemKey};
