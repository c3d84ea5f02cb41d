use super::{FiniteAbelianGroup, GroupElement, Subgroup};
use crate::error::{Error, Result};

/// A homomorphism given by the images of the source's invariant generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteAbelianGroup,
    target: FiniteAbelianGroup,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    /// Checks that `images[i]` has order dividing the `i`-th invariant.
    pub fn new(source: FiniteAbelianGroup, target: FiniteAbelianGroup, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::Input(format!(
                "homomorphism needs {} images, got {}",
                source.rank(),
                images.len()
            )));
        }
        for (img, &d) in images.iter().zip(source.invariants()) {
            if !target.contains(img) {
                return Err(Error::Mismatch(format!("image {:?} not in target", img.coords)));
            }
            if d % target.element_order(img) != 0 {
                return Err(Error::Input(format!(
                    "image {:?} has order {} which does not divide {d}",
                    img.coords,
                    target.element_order(img)
                )));
            }
        }
        Ok(Homomorphism { source, target, images })
    }

    pub fn source(&self) -> &FiniteAbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteAbelianGroup {
        &self.target
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        if !self.source.contains(g) {
            return Err(Error::Mismatch(format!("{:?} not in source", g.coords)));
        }
        let mut acc = self.target.identity();
        for (&c, img) in g.coords.iter().zip(&self.images) {
            acc = self.target.op_unchecked(&acc, &self.target.pow(img, c as i64)?);
        }
        Ok(acc)
    }

    pub fn image(&self) -> Result<Subgroup> {
        Subgroup::generated(&self.target, &self.images)
    }

    /// Kernel as a subgroup of the source, and `[target : image]`.
    pub fn kernel_and_index(&self) -> Result<(Subgroup, u64)> {
        let id = self.target.identity();
        let mut kernel = Vec::new();
        for g in self.source.elements() {
            if self.apply(&g)? == id {
                kernel.push(g);
            }
        }
        let kernel = Subgroup::from_closed_set(&self.source, &kernel)?;
        Ok((kernel, self.image()?.index()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn el(c: &[u64]) -> GroupElement {
        GroupElement { coords: c.to_vec() }
    }

    #[test]
    fn identity_on_z4() {
        let z4 = FiniteAbelianGroup::new(vec![4]).unwrap();
        let f = Homomorphism::new(z4.clone(), z4.clone(), vec![el(&[1])]).unwrap();
        let (k, idx) = f.kernel_and_index().unwrap();
        assert_eq!(k.order(), 1);
        assert_eq!(idx, 1);
    }

    #[test]
    fn zero_map_z4_to_z2() {
        let z4 = FiniteAbelianGroup::new(vec![4]).unwrap();
        let z2 = FiniteAbelianGroup::new(vec![2]).unwrap();
        let f = Homomorphism::new(z4, z2, vec![el(&[0])]).unwrap();
        let (k, idx) = f.kernel_and_index().unwrap();
        assert_eq!(k.order(), 4);
        assert_eq!(idx, 2);
    }

    #[test]
    fn surjection_z6_to_z2() {
        let z6 = FiniteAbelianGroup::new(vec![6]).unwrap();
        let z2 = FiniteAbelianGroup::new(vec![2]).unwrap();
        let f = Homomorphism::new(z6.clone(), z2.clone(), vec![el(&[1])]).unwrap();
        let (k, idx) = f.kernel_and_index().unwrap();
        assert_eq!(k.elements(), &[el(&[0]), el(&[2]), el(&[4])]);
        // Oracle: enumerate the image directly.
        let image: BTreeSet<_> = z6.elements().map(|g| f.apply(&g).unwrap()).collect();
        assert_eq!(idx, z2.order() / image.len() as u64);
        assert_eq!(idx, 1);
    }

    #[test]
    fn ill_defined_image_rejected() {
        let z4 = FiniteAbelianGroup::new(vec![4]).unwrap();
        let z3 = FiniteAbelianGroup::new(vec![3]).unwrap();
        assert!(Homomorphism::new(z4, z3, vec![el(&[1])]).is_err());
    }
}
