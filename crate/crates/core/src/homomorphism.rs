//! Homomorphisms between instances: fact-preserving maps that fix
//! non-null values.

use std::collections::BTreeMap;
use std::fmt;

use crate::relational::Instance;
use crate::value::Value;

/// A value-to-value homomorphism.
pub type Homomorphism = BTreeMap<Value, Value>;

/// Search limits; beyond them the answer would take too long to be trusted.
const MAX_FACTS: usize = 4_000;
const MAX_NULLS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooLarge {
    pub facts: usize,
    pub nulls: usize,
}

impl fmt::Display for TooLarge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "homomorphism search limit exceeded ({} facts, {} nulls)",
            self.facts, self.nulls
        )
    }
}

impl std::error::Error for TooLarge {}

fn extend(
    map: &Homomorphism,
    fact: &[Value],
    candidate: &[Value],
) -> Option<Vec<(Value, Value)>> {
    let mut new_pairs = Vec::new();
    for (v, target) in fact.iter().zip(candidate.iter()) {
        let expected = if v.is_null() { map.get(v).cloned() } else { Some(v.clone()) };
        match expected {
            Some(e) => {
                if e != *target {
                    return None;
                }
            }
            None => {
                if new_pairs.iter().any(|(from, to)| from == v && to != target) {
                    return None;
                }
                if !new_pairs.iter().any(|(from, _)| from == v) {
                    new_pairs.push((v.clone(), target.clone()));
                }
            }
        }
    }
    Some(new_pairs)
}

fn search(
    facts: &[(String, Vec<Value>)],
    index: usize,
    target: &Instance,
    map: &mut Homomorphism,
) -> bool {
    let Some((relation, fact)) = facts.get(index) else {
        return true;
    };
    let candidates: Vec<&Vec<Value>> = target.tuples(relation).collect();
    for candidate in candidates {
        if candidate.len() != fact.len() {
            continue;
        }
        let Some(new_pairs) = extend(map, fact, candidate) else { continue };
        for (from, to) in &new_pairs {
            map.insert(from.clone(), to.clone());
        }
        if search(facts, index + 1, target, map) {
            return true;
        }
        for (from, _) in &new_pairs {
            map.remove(from);
        }
    }
    false
}

/// Finds a homomorphism from `from` into `into`: identity on non-nulls,
/// fact-preserving, with nulls free to map anywhere. Returns `None` when the
/// exhaustive search finds no map.
pub fn find_homomorphism(
    from: &Instance,
    into: &Instance,
) -> Result<Option<Homomorphism>, TooLarge> {
    let nulls = from.active_domain().iter().filter(|v| v.is_null()).count();
    if from.len() > MAX_FACTS || into.len() > MAX_FACTS || nulls > MAX_NULLS {
        return Err(TooLarge { facts: from.len().max(into.len()), nulls });
    }

    // Ground facts first: they are pure membership tests and prune early.
    let mut facts: Vec<(String, Vec<Value>)> = from
        .iter()
        .map(|(rel, tuple)| (rel.clone(), tuple.clone()))
        .collect();
    facts.sort_by_key(|(_, tuple)| tuple.iter().filter(|v| v.is_null()).count());

    let mut map: Homomorphism = Homomorphism::new();
    if search(&facts, 0, into, &mut map) {
        for value in from.active_domain() {
            map.entry(value.clone()).or_insert(value);
        }
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// Both directions of [`find_homomorphism`].
pub fn homomorphically_equivalent(a: &Instance, b: &Instance) -> Result<bool, TooLarge> {
    Ok(find_homomorphism(a, b)?.is_some() && find_homomorphism(b, a)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(s: &str, o: Value) -> (String, Vec<Value>) {
        ("Triple".to_string(), vec![Value::iri(s), Value::iri("urn:p"), o])
    }

    #[test]
    fn identity_on_itself() {
        let inst: Instance = [triple("urn:a", Value::lit("x"))].into_iter().collect();
        let h = find_homomorphism(&inst, &inst).unwrap().unwrap();
        assert!(h.iter().all(|(k, v)| k == v));
    }

    #[test]
    fn null_maps_to_any_witness() {
        let from: Instance = [triple("urn:a", Value::null_lit(1))].into_iter().collect();
        let into: Instance = [
            triple("urn:a", Value::lit("x")),
            triple("urn:a", Value::lit("y")),
        ]
        .into_iter()
        .collect();
        let h = find_homomorphism(&from, &into).unwrap().unwrap();
        let image = h.get(&Value::null_lit(1)).unwrap();
        assert!(image == &Value::lit("x") || image == &Value::lit("y"));
    }

    #[test]
    fn non_null_mismatch_has_no_homomorphism() {
        let from: Instance = [triple("urn:a", Value::lit("x"))].into_iter().collect();
        let into: Instance = [triple("urn:a", Value::lit("y"))].into_iter().collect();
        assert!(find_homomorphism(&from, &into).unwrap().is_none());
    }

    #[test]
    fn joint_null_constraints_respected() {
        // The same null must map consistently across facts.
        let b = Value::blank("b1");
        let from: Instance = [
            ("R".to_string(), vec![b.clone(), Value::lit("1")]),
            ("S".to_string(), vec![b.clone(), Value::lit("2")]),
        ]
        .into_iter()
        .collect();
        let into_good: Instance = [
            ("R".to_string(), vec![Value::iri("urn:n"), Value::lit("1")]),
            ("S".to_string(), vec![Value::iri("urn:n"), Value::lit("2")]),
        ]
        .into_iter()
        .collect();
        let into_bad: Instance = [
            ("R".to_string(), vec![Value::iri("urn:n"), Value::lit("1")]),
            ("S".to_string(), vec![Value::iri("urn:m"), Value::lit("2")]),
        ]
        .into_iter()
        .collect();
        assert!(find_homomorphism(&from, &into_good).unwrap().is_some());
        assert!(find_homomorphism(&from, &into_bad).unwrap().is_none());
    }

    #[test]
    fn size_guard_is_explicit() {
        let mut big = Instance::new();
        for i in 0..70 {
            big.insert("R", vec![Value::null_lit(i), Value::null_lit(i + 1000)]).unwrap();
        }
        assert!(find_homomorphism(&big, &big).is_err());
    }
}
