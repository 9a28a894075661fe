//! Exact enumeration of coloured partitions in two and three dimensions.
//!
//! The crate computes multivariate generating functions of partitions, plane
//! partitions and D_r-partitions coloured by finite abelian group actions
//! (binary dihedral in the D_r case), exactly, as series over arbitrary-
//! precision integers truncated by total degree.  On top of the raw series
//! it provides the closed-form product sides (theta sums over root lattices,
//! twisted plethystic exponentials, MacMahon-type products) and verification
//! routines that compare the two computations term by term.
//!
//! Modules:
//! - [`mpoly`]: sparse truncated multivariate series over big integers,
//!   including the twisted plethystic exponential `PExp^σ`.
//! - [`groups`]: finite abelian colour groups, McKay quivers, Euler forms,
//!   superpotentials and the DT sign.
//! - [`part2d`]: partitions, diagonal colouring, r-cores/r-quotients and the
//!   type-A theta factorisation.
//! - [`dihedral`]: binary dihedral character theory, the D_r-coloured octant
//!   and D_r-partitions.
//! - [`part3d`]: plane partitions, coloured/signed/reduced series and the
//!   positivity checks.
//! - [`qtorus`]: series with Laurent coefficients in a half-power variable
//!   `q^{1/2}`, multiplied through a quiver Euler form.
//! - [`cache`]: the on-disk weight-table cache format.

pub mod cache;
pub mod cyclotomic;
pub mod dihedral;
pub mod groups;
pub mod mpoly;
pub mod part2d;
pub mod part3d;
pub mod qtorus;
pub mod report;
