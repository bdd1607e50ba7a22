pub mod canonical;
pub mod denseness;
pub mod diagram;
pub mod fan;
pub mod fixtures;
pub mod gvector;
pub mod io;
pub mod laurent;
pub mod matrix;
pub mod mutation_class;
pub mod perm;
pub mod seed;

pub use canonical::{canonical_form, canonical_labeling, CanonicalKey};
pub use diagram::{classify_underlying, diagram_of, match_exceptional, Diagram, DiagramType, Exceptional, Family};
pub use matrix::{ExchangeMatrix, ExtendedMatrix, MatrixError, SymmetrizerError};
pub use mutation_class::{classify_type, explore, find_acyclic_representative, MutationClassReport, Verdict};
pub use laurent::{LaurentError, LaurentExpr};
pub use seed::{enumerate_seeds, Seed, SeedEnumeration, SeedError};
pub use fan::{build_fan, ConeIndex, FanError, FanRoute, GFan};
pub use gvector::{g_vector_by_grading, g_vectors_by_recursion, nz_transition, GVector};
pub use denseness::{general_verdict, hereditary_g_tame, rank2_boundary, DensenessVerdict, Status};
