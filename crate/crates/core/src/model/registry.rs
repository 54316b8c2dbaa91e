use std::collections::BTreeMap;

use super::system::{
    Burgers, Burgers2d, CallbackSystem, CoeffFn, ConstantSystem, JacobianFn, Sym2, System,
};
use crate::error::{Error, Result};

/// Name-keyed collection of validated systems.
#[derive(Clone, Debug)]
pub struct Registry {
    systems: BTreeMap<String, System>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Self { systems: BTreeMap::new() }
    }

    /// `burgers`, `sym2`, `burgers2d`, plus the scalar `zero` system and
    /// unit-speed `transport`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        let builtins = [
            System::new(Burgers),
            System::new(Sym2),
            System::new(Burgers2d),
            System::new(ConstantSystem::zero(1, 1)),
            System::new(ConstantSystem::new("transport", 1, 1, vec![1.0]).expect("one entry")),
        ];
        for s in builtins {
            r.insert(s.expect("built-in systems are valid"));
        }
        r
    }

    pub fn insert(&mut self, system: System) {
        self.systems.insert(system.name().to_string(), system);
    }

    /// Validates and registers a system given by callbacks.
    pub fn register(
        &mut self,
        name: &str,
        dim: usize,
        components: usize,
        coeff: CoeffFn,
        jacobian: JacobianFn,
    ) -> Result<System> {
        let system = System::new(CallbackSystem {
            name: name.to_string(),
            dim,
            components,
            coeff,
            jacobian,
        })?;
        self.insert(system.clone());
        Ok(system)
    }

    pub fn get(&self, name: &str) -> Result<System> {
        self.systems.get(name).cloned().ok_or_else(|| Error::UnknownSystem(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.systems.keys().map(String::as_str).collect()
    }
}

/// Looks up a built-in system by name.
pub fn builtin(name: &str) -> Result<System> {
    Registry::with_builtins().get(name)
}
