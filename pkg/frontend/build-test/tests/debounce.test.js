import assert from "node:assert/strict";
import test from "node:test";
import { setTimeout as sleep } from "node:timers/promises";
import { debounce } from "../src/debounce.js";
test("a burst of edits collapses into one trailing call", async () => {
    let calls = 0;
    const run = debounce(() => {
        calls += 1;
    }, 20);
    run();
    run();
    run();
    assert.equal(calls, 0); // nothing until the window closes
    await sleep(60);
    assert.equal(calls, 1);
});
test("separate bursts each fire once", async () => {
    let calls = 0;
    const run = debounce(() => {
        calls += 1;
    }, 15);
    run();
    await sleep(50);
    run();
    run();
    await sleep(50);
    assert.equal(calls, 2);
});
test("cancel drops the pending call", async () => {
    let calls = 0;
    const run = debounce(() => {
        calls += 1;
    }, 15);
    run();
    run.cancel();
    await sleep(50);
    assert.equal(calls, 0);
});
test("flush fires the pending call immediately", () => {
    const seen = [];
    const run = debounce((x) => seen.push(x), 1000);
    run(1);
    run(2);
    run.flush();
    assert.deepEqual(seen, [2]); // latest arguments win
});
