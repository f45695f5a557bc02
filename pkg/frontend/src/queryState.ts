/** Query-building state: per-role concept chips with and/or mode.
 *
 * The state is the single source of truth for the current query; it
 * serializes losslessly to a shareable URL query string and to the API's
 * query body.
 */

import { ApiQuery, CombineMode, ROLES, Role } from "./types.js";

export interface Chip {
  conceptId: string;
  name: string;
}

export interface RoleState {
  chips: Chip[];
  mode: CombineMode;
}

export interface QueryState {
  population: RoleState;
  intervention: RoleState;
  outcome: RoleState;
}

export function emptyQueryState(): QueryState {
  return {
    population: { chips: [], mode: "or" },
    intervention: { chips: [], mode: "or" },
    outcome: { chips: [], mode: "or" },
  };
}

export function isEmpty(state: QueryState): boolean {
  return ROLES.every((role) => state[role].chips.length === 0);
}

/** Append a chip unless the concept is already selected for the role.
 * Returns the same state object on a no-op so callers can cheaply detect it. */
export function addChip(state: QueryState, role: Role, chip: Chip): QueryState {
  if (state[role].chips.some((c) => c.conceptId === chip.conceptId)) {
    return state;
  }
  return {
    ...state,
    [role]: { ...state[role], chips: [...state[role].chips, chip] },
  };
}

export function removeChip(state: QueryState, role: Role, conceptId: string): QueryState {
  return {
    ...state,
    [role]: {
      ...state[role],
      chips: state[role].chips.filter((c) => c.conceptId !== conceptId),
    },
  };
}

export function setMode(state: QueryState, role: Role, mode: CombineMode): QueryState {
  return { ...state, [role]: { ...state[role], mode } };
}

export function clearAll(): QueryState {
  return emptyQueryState();
}

export function toApiQuery(state: QueryState): ApiQuery {
  const conv = (rs: RoleState) => ({
    concept_ids: rs.chips.map((c) => c.conceptId),
    mode: rs.mode,
  });
  return {
    population: conv(state.population),
    intervention: conv(state.intervention),
    outcome: conv(state.outcome),
  };
}

// URL encoding: one repeated parameter per chip (`p=id~name`), plus the
// role's mode when it is not the default.  URLSearchParams handles all
// percent-escaping; the id~name separator is escaped inside values.
const ROLE_PARAM: Record<Role, string> = {
  population: "p",
  intervention: "i",
  outcome: "o",
};

const SEP = "~";

function packChip(chip: Chip): string {
  const esc = (s: string) => s.replace(/%/g, "%25").replace(/~/g, "%7E");
  return `${esc(chip.conceptId)}${SEP}${esc(chip.name)}`;
}

function unpackChip(raw: string): Chip | null {
  const at = raw.indexOf(SEP);
  if (at < 0) return null;
  const unesc = (s: string) => s.replace(/%7E/g, "~").replace(/%25/g, "%");
  return { conceptId: unesc(raw.slice(0, at)), name: unesc(raw.slice(at + 1)) };
}

export function encodeQueryState(state: QueryState): string {
  const params = new URLSearchParams();
  for (const role of ROLES) {
    for (const chip of state[role].chips) {
      params.append(ROLE_PARAM[role], packChip(chip));
    }
    if (state[role].mode !== "or") {
      params.set(`${ROLE_PARAM[role]}m`, state[role].mode);
    }
  }
  return params.toString();
}

export function decodeQueryState(encoded: string): QueryState {
  const params = new URLSearchParams(encoded);
  const state = emptyQueryState();
  for (const role of ROLES) {
    const chips: Chip[] = [];
    for (const raw of params.getAll(ROLE_PARAM[role])) {
      const chip = unpackChip(raw);
      if (chip !== null && !chips.some((c) => c.conceptId === chip.conceptId)) {
        chips.push(chip);
      }
    }
    const mode = params.get(`${ROLE_PARAM[role]}m`);
    state[role] = { chips, mode: mode === "and" ? "and" : "or" };
  }
  return state;
}
