use crate::error::Result;
use crate::invariants::{self, Rule, Violation};
use crate::orientation::{OpStats, Structure};
use crate::scalar::Scalar;
use crate::Vertex;

/// Common interface of the graph orientation maintainers.
pub trait Maintainer {
    type Scalar: Scalar;

    fn structure(&self) -> &Structure<Self::Scalar>;

    /// Which family of label inequalities this maintainer keeps.
    fn rule(&self) -> Rule;

    /// Adds one copy of `{u, v}` and repairs the orientation.
    fn insert(&mut self, u: Vertex, v: Vertex) -> Result<OpStats>;

    /// Removes one copy of `{u, v}` and repairs the orientation.
    fn delete(&mut self, u: Vertex, v: Vertex) -> Result<OpStats>;

    /// Runs the full invariant scan for this maintainer's rule.
    fn check_invariants(&self) -> std::result::Result<(), Violation> {
        invariants::check(self.structure(), self.rule())
    }
}
