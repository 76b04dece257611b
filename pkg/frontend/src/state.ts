// Wizard state and its transitions, all pure: every mutation returns a new
// state object, which keeps the scripted walk tests trivial.

import type { ExecuteResponse, TranslationResponse } from './types.js'
import {
  Atom,
  Combinator,
  DraftAssertion,
  serializeAssertion,
  serializeConcept,
} from './serialize.js'

export interface WizardState {
  classPath: string[] // breadcrumbs from a root down to the selected class
  draft: DraftAssertion
  assertions: string[] // completed, serialized assertion texts
  conceptName: string
  lastTranslation: TranslationResponse | null
  lastResult: ExecuteResponse | null
}

export function initialState(): WizardState {
  return {
    classPath: [],
    draft: { atoms: [], combinators: [] },
    assertions: [],
    conceptName: 'MY_CONCEPT',
    lastTranslation: null,
    lastResult: null,
  }
}

export function selectedClass(state: WizardState): string | null {
  return state.classPath.length > 0 ? state.classPath[state.classPath.length - 1] : null
}

export function enterClass(state: WizardState, name: string): WizardState {
  return { ...state, classPath: [...state.classPath, name] }
}

export function popClass(state: WizardState): WizardState {
  return { ...state, classPath: state.classPath.slice(0, -1) }
}

export function addAtom(state: WizardState, atom: Atom, combinator: Combinator): WizardState {
  const draft = state.draft
  const combinators = draft.atoms.length > 0
    ? [...draft.combinators, combinator]
    : draft.combinators
  return {
    ...state,
    draft: { atoms: [...draft.atoms, atom], combinators },
  }
}

export function setCombinator(state: WizardState, index: number, combinator: Combinator): WizardState {
  const combinators = state.draft.combinators.slice()
  combinators[index] = combinator
  return { ...state, draft: { ...state.draft, combinators } }
}

export function removeLastAtom(state: WizardState): WizardState {
  const atoms = state.draft.atoms.slice(0, -1)
  const combinators = state.draft.combinators.slice(0, Math.max(0, atoms.length - 1))
  return { ...state, draft: { atoms, combinators } }
}

export function completeAssertion(state: WizardState): WizardState {
  const text = serializeAssertion(state.draft)
  return {
    ...state,
    assertions: [...state.assertions, text],
    draft: { atoms: [], combinators: [] },
  }
}

export function removeAssertion(state: WizardState, index: number): WizardState {
  return { ...state, assertions: state.assertions.filter((_, i) => i !== index) }
}

export function setConceptName(state: WizardState, name: string): WizardState {
  return { ...state, conceptName: name }
}

export function combinatorsEnabled(state: WizardState): boolean {
  return state.draft.atoms.length >= 1
}

/** Everything the user has built so far, as one translatable payload. */
export function serializeState(state: WizardState):
  | { kind: 'expr'; text: string }
  | { kind: 'concept'; text: string; name: string } {
  const assertions = state.assertions.slice()
  if (state.draft.atoms.length > 0) {
    assertions.push(serializeAssertion(state.draft))
  }
  if (assertions.length === 0) {
    throw new Error('nothing to translate yet')
  }
  if (assertions.length === 1) {
    return { kind: 'expr', text: assertions[0] }
  }
  return {
    kind: 'concept',
    text: serializeConcept(state.conceptName, assertions),
    name: state.conceptName,
  }
}
