//! Exact-arithmetic workbench for finite geometry: eggs and pseudo-ovoids of
//! PG(2n+m-1,q), the translation generalized quadrangles T(n,m,q) built from
//! them, the conic/Segre/regulus machinery that certifies goodness, and flock
//! quadrangles from q-clans.
//!
//! Everything computes over GF(p^e) with no floating point anywhere; all
//! checks either enumerate exhaustively or use seeded sampling with the seed
//! recorded, so identical inputs and seeds reproduce identical reports.

pub mod bitset;
pub mod conic;
pub mod conics;
pub mod egg;
pub mod flock;
pub mod gf;
pub mod gq;
pub mod io;
pub mod linalg;
pub mod projgeom;
pub mod report;
pub mod suite;
pub mod tgq;
