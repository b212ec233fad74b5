//! Information segregation of population groups over a space of information
//! units.
//!
//! The pipeline runs from who-follows-what data to per-group fractional
//! personhoods and on to five segregation measures:
//!
//! - [`personhood`]: membership logs or union-reach observations become
//!   exact access-set counts, then personhoods (`1/k` of a person per unit
//!   for someone following `k` units).
//! - [`measures`]: evenness, joint exposure, concentration, centralization
//!   and clustering, plus [`measures::measure_all`] for whole reports.
//! - [`mapping`]: audience-weighted leaning scores that place sources in
//!   one of five political units.
//! - [`io`], [`synth`], [`cli`]: file formats, synthetic populations and the
//!   command-line front end.
//!
//! ```
//! use infoseg::model::{AccessSet, ExactSetCounts};
//! use infoseg::measures::{evenness, Variant};
//! use infoseg::personhood::personhoods;
//!
//! let mut counts = ExactSetCounts::new(["i", "j"]).unwrap();
//! counts.add("g", AccessSet::from_indices([0]), 1).unwrap();
//! counts.add("g", AccessSet::from_indices([0, 1]), 1).unwrap();
//! counts.add("g", AccessSet::from_indices([1]), 1).unwrap();
//!
//! let table = personhoods(&counts);
//! assert_eq!(table.group("g").unwrap().mass, vec![1.5, 1.5]);
//! let g = table.distribution("g").unwrap();
//! assert_eq!(evenness(&g, Variant::Classical).unwrap(), 1.0);
//! ```

#![forbid(unsafe_code)]

pub mod cli;
pub mod io;
pub mod mapping;
pub mod measures;
pub mod model;
pub mod personhood;
pub mod synth;
