use proptest::prelude::*;

use crate::model::{Batch, Instance, JobId};

/// Random instance strategy: `(p, s, d)` triples with sizes bounded by capacity.
pub fn arb_instance(max_n: usize) -> impl Strategy<Value = Instance> {
    (10u64..=40).prop_flat_map(move |cap| {
        prop::collection::vec((1u64..=30, 1u64..=cap, 1u64..=80), 1..=max_n)
            .prop_map(move |t| Instance::from_triples(cap, &t).unwrap())
    })
}

/// Random instance paired with a feasible first-fit batching of a random order.
pub fn arb_instance_and_partition(max_n: usize) -> impl Strategy<Value = (Instance, Vec<Batch>)> {
    arb_instance(max_n).prop_flat_map(|inst| {
        let ids: Vec<JobId> = inst.ids().collect();
        (Just(inst), Just(ids).prop_shuffle()).prop_map(|(inst, order)| {
            let mut batches: Vec<Batch> = Vec::new();
            let mut loads: Vec<u64> = Vec::new();
            for id in order {
                let s = inst.job(id).size;
                match loads.iter().position(|&l| l + s <= inst.capacity()) {
                    Some(b) => {
                        batches[b].push(id);
                        loads[b] += s;
                    }
                    None => {
                        batches.push(vec![id]);
                        loads.push(s);
                    }
                }
            }
            (inst, batches)
        })
    })
}
