//! Color-indexed families of carriers (the objects of V^O) and their
//! colorwise maps. Family elements carry truncation weights: the number of
//! arity slots an element consumes when it decorates a straight leaf.
//! Plain elements weigh 1; elements of constructed algebras carry their
//! generator count, so nullary-generated constants weigh 0.

use std::collections::BTreeMap;

use crate::carrier::{Carrier, CarrierMapOf, Kind};
use crate::error::Error;
use crate::profile::Color;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ColoredFamily {
    pub kind: Kind,
    pub colors: Vec<Color>,
    carriers: BTreeMap<Color, Carrier>,
    weights: BTreeMap<Color, Vec<usize>>,
}

impl ColoredFamily {
    pub fn empty(kind: Kind, colors: &[Color]) -> Self {
        ColoredFamily {
            kind,
            colors: colors.to_vec(),
            carriers: BTreeMap::new(),
            weights: BTreeMap::new(),
        }
    }

    /// Insert a carrier with unit weights.
    pub fn with_carrier(mut self, color: impl Into<Color>, carrier: Carrier) -> Self {
        let w = vec![1; carrier.size()];
        self.set_carrier(color.into(), carrier, w);
        self
    }

    pub fn set_carrier(&mut self, color: Color, carrier: Carrier, weights: Vec<usize>) {
        assert_eq!(carrier.size(), weights.len());
        assert_eq!(carrier.kind(), self.kind);
        if carrier.is_empty() {
            self.carriers.remove(&color);
            self.weights.remove(&color);
        } else {
            self.carriers.insert(color.clone(), carrier);
            self.weights.insert(color, weights);
        }
    }

    /// The carrier at a color; empty/zero if unset.
    pub fn carrier(&self, color: &str) -> Carrier {
        self.carriers.get(color).cloned().unwrap_or_else(|| Carrier::initial(self.kind))
    }

    pub fn weights(&self, color: &str) -> Vec<usize> {
        self.weights.get(color).cloned().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.carriers.values().all(|c| c.is_empty())
    }

    /// Colors carrying a nonempty carrier.
    pub fn support(&self) -> Vec<Color> {
        self.carriers.keys().cloned().collect()
    }

    pub fn total_size(&self) -> usize {
        self.carriers.values().map(|c| c.size()).sum()
    }
}

/// A colorwise map of families.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMap<S: Scalar> {
    pub source: ColoredFamily,
    pub target: ColoredFamily,
    maps: BTreeMap<Color, CarrierMapOf<S>>,
}

impl<S: Scalar> FamilyMap<S> {
    pub fn new(
        source: ColoredFamily,
        target: ColoredFamily,
        maps: BTreeMap<Color, CarrierMapOf<S>>,
    ) -> Result<Self, Error> {
        for color in &source.colors {
            let src = source.carrier(color);
            if src.is_empty() {
                continue;
            }
            let Some(m) = maps.get(color) else {
                return Err(Error::invalid(format!("family map missing color {color}")));
            };
            if m.source() != &src || m.target() != &target.carrier(color) {
                return Err(Error::ShapeMismatch(format!("family map at color {color}")));
            }
        }
        Ok(FamilyMap { source, target, maps })
    }

    pub fn identity(f: &ColoredFamily) -> Self {
        let maps = f
            .support()
            .iter()
            .map(|c| (c.clone(), CarrierMapOf::identity(&f.carrier(c))))
            .collect();
        FamilyMap { source: f.clone(), target: f.clone(), maps }
    }

    pub fn at(&self, color: &str) -> CarrierMapOf<S> {
        self.maps.get(color).cloned().unwrap_or_else(|| {
            CarrierMapOf::from_initial(&self.target.carrier(color))
        })
    }

    pub fn is_iso(&self) -> bool {
        self.source.support() == self.target.support()
            && self.maps.values().all(|m| m.is_iso())
            && self.target.support().iter().all(|c| !self.source.carrier(c).is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn empty_family_has_initial_carriers() {
        let f = ColoredFamily::empty(Kind::Set, &["c".into()]);
        assert!(f.carrier("c").is_empty());
        assert!(f.is_empty());
    }

    #[test]
    fn family_map_shape_checked() {
        let x = ColoredFamily::empty(Kind::Set, &["c".into()])
            .with_carrier("c", Carrier::set(vec!["x".into()]).unwrap());
        let y = ColoredFamily::empty(Kind::Set, &["c".into()])
            .with_carrier("c", Carrier::set(vec!["y".into(), "z".into()]).unwrap());
        let m = CarrierMapOf::<Rat>::from_label_fn(&x.carrier("c"), &y.carrier("c"), |_| "y".into())
            .unwrap();
        let mut maps = BTreeMap::new();
        maps.insert("c".to_string(), m);
        assert!(FamilyMap::new(x.clone(), y, maps).is_ok());
        assert!(FamilyMap::<Rat>::identity(&x).is_iso());
    }
}
