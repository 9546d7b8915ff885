use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use super::{s_transform_expansion, unit_expansion, UnitProduct};
use crate::algebra::{format_rational, CyclotomicField, CyclotomicNumber, Rational};
use crate::qseries::PuiseuxSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExpansionKind {
    Unit,
    STransform,
}

/// Identifies one cached expansion: what was expanded and to which precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey {
    pub kind: ExpansionKind,
    pub product: UnitProduct,
    pub prec: Rational,
}

impl CacheKey {
    /// Stable text form, e.g. `unit:5:1,2@7/2`.
    pub fn canonical(&self) -> String {
        let kind = match self.kind {
            ExpansionKind::Unit => "unit",
            ExpansionKind::STransform => "stransform",
        };
        let rs: Vec<String> = self.product.residues().iter().map(|r| r.to_string()).collect();
        format!(
            "{kind}:{}:{}@{}",
            self.product.level(),
            rs.join(","),
            format_rational(&self.prec)
        )
    }
}

/// Persistent backing for the in-memory cache (for example a directory of JSON files).
pub trait ExpansionStore: Send + Sync {
    fn load(&self, key: &str) -> Option<String>;
    fn save(&self, key: &str, value: &str);
}

type Map<T> = RwLock<HashMap<CacheKey, Arc<PuiseuxSeries<T>>>>;

/// Memoizes unit expansions and their S-images. Reads proceed concurrently;
/// values are computed outside the lock and inserted one at a time.
#[derive(Default)]
pub struct ExpansionCache {
    units: Map<Rational>,
    transforms: Map<CyclotomicNumber>,
    store: Option<Arc<dyn ExpansionStore>>,
}

impl ExpansionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_store(store: Arc<dyn ExpansionStore>) -> Self {
        ExpansionCache {
            store: Some(store),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.units.read().unwrap().len() + self.transforms.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn unit(&self, p: &UnitProduct, prec: &Rational) -> Arc<PuiseuxSeries<Rational>> {
        let key = CacheKey {
            kind: ExpansionKind::Unit,
            product: p.clone(),
            prec: prec.clone(),
        };
        self.lookup(&self.units, key, &(), || unit_expansion(p, prec))
    }

    pub fn s_transform(&self, p: &UnitProduct, prec: &Rational) -> Arc<PuiseuxSeries<CyclotomicNumber>> {
        let key = CacheKey {
            kind: ExpansionKind::STransform,
            product: p.clone(),
            prec: prec.clone(),
        };
        let field = CyclotomicField::get(p.level());
        self.lookup(&self.transforms, key, &field, || s_transform_expansion(p, prec))
    }

    fn lookup<F: crate::algebra::Field>(
        &self,
        map: &Map<F>,
        key: CacheKey,
        ctx: &F::Ctx,
        compute: impl FnOnce() -> PuiseuxSeries<F>,
    ) -> Arc<PuiseuxSeries<F>> {
        if let Some(v) = map.read().unwrap().get(&key) {
            return v.clone();
        }
        let name = key.canonical();
        let stored = self.store.as_ref().and_then(|s| {
            let text = s.load(&name)?;
            let json = serde_json::from_str(&text).ok()?;
            match PuiseuxSeries::from_json(ctx, &json) {
                Ok(v) => Some(v),
                Err(e) => {
                    log::warn!("ignoring unreadable cache entry {name}: {e}");
                    None
                }
            }
        });
        let fresh = stored.is_none();
        let value = Arc::new(stored.unwrap_or_else(compute));
        let mut w = map.write().unwrap();
        let value = w.entry(key).or_insert(value).clone();
        drop(w);
        if fresh {
            if let Some(s) = &self.store {
                s.save(&name, &value.to_json().to_string());
            }
        }
        value
    }
}
