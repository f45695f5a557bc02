import { describe, expect, it } from "vitest";

import {
  Chip,
  QueryState,
  addChip,
  decodeQueryState,
  emptyQueryState,
  encodeQueryState,
  isEmpty,
  removeChip,
  setMode,
  toApiQuery,
} from "./queryState.js";
import { ROLES } from "./types.js";

// deterministic RNG for the property tests (mulberry32)
function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const NAME_CHARS = [
  "a", "B", "9", " ", "-", ",", "~", "%", "&", "=", "é", "β", "漢", "😀", "'", '"', "/", "?",
];

function randomState(rand: () => number): QueryState {
  let state = emptyQueryState();
  for (const role of ROLES) {
    const n = Math.floor(rand() * 4);
    for (let k = 0; k < n; k++) {
      const idLen = 1 + Math.floor(rand() * 6);
      let id = "";
      for (let j = 0; j < idLen; j++) {
        id += NAME_CHARS[Math.floor(rand() * NAME_CHARS.length)];
      }
      const nameLen = Math.floor(rand() * 12);
      let name = "";
      for (let j = 0; j < nameLen; j++) {
        name += NAME_CHARS[Math.floor(rand() * NAME_CHARS.length)];
      }
      state = addChip(state, role, { conceptId: `${id}${k}`, name });
    }
    if (rand() < 0.5) state = setMode(state, role, "and");
  }
  return state;
}

describe("QueryState URL round-trip", () => {
  it("is lossless over 300 generated states with hostile characters", () => {
    const rand = rng(20240823);
    for (let k = 0; k < 300; k++) {
      const state = randomState(rand);
      const decoded = decodeQueryState(encodeQueryState(state));
      expect(decoded).toEqual(state);
    }
  });

  it("round-trips the empty state", () => {
    expect(decodeQueryState(encodeQueryState(emptyQueryState()))).toEqual(
      emptyQueryState(),
    );
  });

  it("survives a browser URL embedding", () => {
    let state = emptyQueryState();
    state = addChip(state, "population", { conceptId: "C003", name: "Diabetes Mellitus" });
    state = addChip(state, "outcome", { conceptId: "O005", name: "HbA1c ~ 7%" });
    state = setMode(state, "population", "and");
    const url = new URL(`https://example.test/app?${encodeQueryState(state)}`);
    expect(decodeQueryState(url.search.slice(1))).toEqual(state);
  });

  it("ignores unrelated parameters", () => {
    const encoded = `${encodeQueryState(emptyQueryState())}&utm_source=x`;
    expect(decodeQueryState(encoded)).toEqual(emptyQueryState());
  });
});

describe("chip editing", () => {
  const chip: Chip = { conceptId: "C1", name: "Concept One" };

  it("adds a chip once", () => {
    const a = addChip(emptyQueryState(), "outcome", chip);
    expect(a.outcome.chips).toEqual([chip]);
  });

  it("duplicate concept is a no-op returning the same object", () => {
    const a = addChip(emptyQueryState(), "outcome", chip);
    const b = addChip(a, "outcome", { conceptId: "C1", name: "Renamed" });
    expect(b).toBe(a);
  });

  it("same concept may appear under different roles", () => {
    let s = addChip(emptyQueryState(), "outcome", chip);
    s = addChip(s, "intervention", chip);
    expect(s.outcome.chips).toHaveLength(1);
    expect(s.intervention.chips).toHaveLength(1);
  });

  it("remove then isEmpty", () => {
    let s = addChip(emptyQueryState(), "outcome", chip);
    s = removeChip(s, "outcome", "C1");
    expect(isEmpty(s)).toBe(true);
  });
});

describe("API query serialization", () => {
  it("maps chips and modes", () => {
    let s = emptyQueryState();
    s = addChip(s, "population", { conceptId: "C003", name: "Diabetes" });
    s = addChip(s, "population", { conceptId: "C004", name: "Type 2" });
    s = setMode(s, "population", "and");
    expect(toApiQuery(s)).toEqual({
      population: { concept_ids: ["C003", "C004"], mode: "and" },
      intervention: { concept_ids: [], mode: "or" },
      outcome: { concept_ids: [], mode: "or" },
    });
  });
});
