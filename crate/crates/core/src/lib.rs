//! Typed metagraphs: typed hyperedges joined by connections, their directed
//! form, a constructor algebra with its laws, recursion schemes over
//! construction expressions, metapath topology and a process model.

pub mod construct;
pub mod dtmg;
pub mod edge;
pub mod error;
pub mod io;
pub mod iso;
pub mod morph;
pub mod process;
pub mod tmg;
pub mod topology;
pub mod types;
pub mod value;

pub use dtmg::{Dtmg, Role};
pub use edge::{Connection, Edge, EdgeKey, Target, TargetRef, TargetTuple};
pub use error::{MgError, Result};
pub use tmg::{Tmg, Violation};
pub use types::{TypeRegistry, ROOT};
pub use value::Value;
