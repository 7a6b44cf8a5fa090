// Form state <-> request serialization is bijective against the documented
// schema: fixtures survive a parse/serialize round trip unchanged, and so
// does a seeded population of generated requests.

import assert from "node:assert/strict";
import test from "node:test";

import {
  authorFormFromRequest,
  authorFormToRequest,
  paperFormFromRequest,
  paperFormToRequest,
} from "../src/forms.js";
import { API_SCHEMA } from "../src/schema.js";
import type { HIndexRequest, PaperRequest } from "../src/types.js";

test("hindex fixture round-trips through the form state", () => {
  const fixture = API_SCHEMA.fixtures.hindex_request as HIndexRequest;
  const form = authorFormFromRequest(fixture);
  const back = authorFormToRequest(form, fixture.horizon_years);
  assert.deepEqual(back, fixture);
});

test("paper fixture round-trips through the form state", () => {
  const fixture = API_SCHEMA.fixtures.paper_request as unknown as PaperRequest;
  const back = paperFormToRequest(paperFormFromRequest(fixture));
  assert.deepEqual(back, fixture);
});

// deterministic linear-congruential values stand in for a property test
function* lcg(seed: number): Generator<number> {
  let state = seed >>> 0;
  while (true) {
    state = (state * 1664525 + 1013904223) >>> 0;
    yield state / 2 ** 32;
  }
}

test("generated paper requests round-trip (seeded population)", () => {
  const rand = lcg(99);
  const next = () => rand.next().value as number;
  for (let i = 0; i < 200; i++) {
    const authors = [];
    const nAuthors = 1 + Math.floor(next() * 3);
    for (let a = 0; a < nAuthors; a++) {
      if (next() < 0.5) {
        authors.push({ name: `Author ${a}`, author_id: `a${Math.floor(next() * 100)}` });
      } else {
        const manual: Record<string, unknown> = { h: Math.floor(next() * 20) };
        if (next() < 0.5) {
          manual.prior_citations = [Math.floor(next() * 30), Math.floor(next() * 30)];
        }
        if (next() < 0.5) manual.delta_h = Math.floor(next() * 5);
        authors.push({ name: `Author ${a}`, manual: manual as { h: number } });
      }
    }
    const request: PaperRequest = {
      title: `title ${i}`,
      abstract: next() < 0.3 ? "" : `abstract ${i}`,
      year: 2000 + Math.floor(next() * 12),
      primary_mode: next() < 0.5 ? "max-h" : "first",
      authors,
    };
    const roll = next();
    if (roll < 0.33) {
      request.venue = { name: `Venue ${Math.floor(next() * 10)}` };
    } else if (roll < 0.66) {
      request.venue = {
        manual: {
          h_index: Math.floor(next() * 40),
          avg_citations: Math.round(next() * 200) / 10,
        },
      };
    }
    const back = paperFormToRequest(paperFormFromRequest(request));
    assert.deepEqual(back, request, `case ${i}`);
  }
});

test("generated author requests round-trip (seeded population)", () => {
  const rand = lcg(7);
  const next = () => rand.next().value as number;
  for (let i = 0; i < 200; i++) {
    const request: HIndexRequest = {
      current_h: Math.floor(next() * 60),
      num_papers: Math.floor(next() * 300),
      avg_citations: Math.round(next() * 500) / 10,
      num_coauthors: Math.floor(next() * 80),
      years_active: Math.floor(next() * 40),
      horizon_years: 1 + Math.floor(next() * 10),
    };
    const back = authorFormToRequest(authorFormFromRequest(request), request.horizon_years);
    assert.deepEqual(back, request, `case ${i}`);
  }
});
