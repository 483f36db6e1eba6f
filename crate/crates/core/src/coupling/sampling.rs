//! Direct samplers for the laws the processes are compared against.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgePair, SimpleGraph};
use crate::oracle::RegularFamily;

/// Uniform member of an explicit family.
pub fn sample_uniform_regular<R: Rng + ?Sized>(family: &RegularFamily, rng: &mut R) -> Result<SimpleGraph> {
    if family.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    let m = family.masks()[rng.random_range(0..family.len())];
    Ok(SimpleGraph::from_mask(family.order(), m))
}

/// `F(n, d, dn/2 + m)`: a uniform `d`-regular `K` plus `m` uniform non-edges of `K`.
pub fn sample_regular_plus<R: Rng + ?Sized>(family: &RegularFamily, m: usize, rng: &mut R) -> Result<(SimpleGraph, SimpleGraph)> {
    let k = sample_uniform_regular(family, rng)?;
    let holes: Vec<EdgePair> = k.complement().edges().collect();
    if m > holes.len() {
        return Err(Error::InvalidParams(format!("m = {m} exceeds the {} non-edges", holes.len())));
    }
    let mut f = k.clone();
    for i in sample(rng, holes.len(), m).iter() {
        f.add_edge(holes[i])?;
    }
    Ok((k, f))
}

/// A uniform `d`-regular `K` minus `m` uniform edges of `K`.
pub fn sample_regular_minus<R: Rng + ?Sized>(family: &RegularFamily, m: usize, rng: &mut R) -> Result<(SimpleGraph, SimpleGraph)> {
    let k = sample_uniform_regular(family, rng)?;
    let edges: Vec<EdgePair> = k.edges().collect();
    if m > edges.len() {
        return Err(Error::InvalidParams(format!("m = {m} exceeds the {} edges", edges.len())));
    }
    let mut f = k.clone();
    for i in sample(rng, edges.len(), m).iter() {
        f.remove_edge(edges[i])?;
    }
    Ok((k, f))
}
