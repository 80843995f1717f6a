import assert from "node:assert/strict";
import { test } from "node:test";
import { decodeFilterState, emptyFilterState, encodeFilterState, stateToken, validateFilterState, } from "../src/filter-state.js";
test("empty state is valid and encodes to nothing", () => {
    const state = emptyFilterState();
    assert.deepEqual(validateFilterState(state), []);
    assert.equal(encodeFilterState(state), "");
});
test("encode/decode round trip preserves every field", () => {
    const state = emptyFilterState();
    state.option = ["ZPL", "lifetime"];
    state.host = ["bulk"];
    state.spinMultiplicity = ["doublet", "triplet"];
    state.chargeState = [-1, 0, 2];
    state.opticalSpinTransition = ["up"];
    state.valueRange = [2.0, 4.25];
    state.selectedRow = 7;
    state.refractiveIndex = 2.4;
    const decoded = decodeFilterState("?" + encodeFilterState(state));
    assert.deepEqual(decoded, state);
});
test("validation mirrors the server rules", () => {
    const bad = emptyFilterState();
    bad.option = ["ZPL", "bogus"];
    bad.host = ["slab"];
    bad.spinMultiplicity = ["quartet"];
    bad.chargeState = [3];
    bad.opticalSpinTransition = ["sideways"];
    bad.valueRange = [4.0, 2.0];
    bad.refractiveIndex = 0.5;
    const problems = validateFilterState(bad);
    assert.ok(problems.some((p) => p.includes("unknown option key: bogus")));
    assert.ok(problems.some((p) => p.includes("invalid host: slab")));
    assert.ok(problems.some((p) => p.includes("quartet")));
    assert.ok(problems.some((p) => p.includes("charge_state: 3")));
    assert.ok(problems.some((p) => p.includes("sideways")));
    assert.ok(problems.some((p) => p.includes("lo <= hi")));
    assert.ok(problems.some((p) => p.includes("refractive index")));
});
test("value_range needs exactly one numeric option", () => {
    const state = emptyFilterState();
    state.valueRange = [1, 2];
    assert.ok(validateFilterState(state)
        .some((p) => p.includes("exactly one numeric option, 0 selected")));
    state.option = ["ZPL", "HR"];
    assert.ok(validateFilterState(state)
        .some((p) => p.includes("exactly one numeric option, 2 selected")));
    state.option = ["ZPL"];
    assert.deepEqual(validateFilterState(state), []);
    state.option = ["PL"];
    assert.ok(validateFilterState(state)
        .some((p) => p.includes("exactly one numeric option, 0 selected")));
});
test("'all' cannot be combined", () => {
    const state = emptyFilterState();
    state.option = ["all", "ZPL"];
    assert.ok(validateFilterState(state)
        .some((p) => p.includes("'all' cannot be combined")));
    state.option = ["all"];
    assert.deepEqual(validateFilterState(state), []);
});
test("token ignores list order but tracks values", () => {
    const a = emptyFilterState();
    a.host = ["bulk", "monolayer"];
    a.chargeState = [1, -1];
    const b = emptyFilterState();
    b.host = ["monolayer", "bulk"];
    b.chargeState = [-1, 1];
    assert.equal(stateToken(a), stateToken(b));
    b.chargeState = [-1];
    assert.notEqual(stateToken(a), stateToken(b));
});
test("selected row and slider are not part of the query token", () => {
    const a = emptyFilterState();
    const b = emptyFilterState();
    b.selectedRow = 3;
    b.refractiveIndex = 2.2;
    assert.equal(stateToken(a), stateToken(b));
});
