// State-to-text serialization: the ONLY place the client writes DL syntax.
// Anything this produces must parse server-side; the round trip is property-
// tested by scripted state walks.

export type Operator = 'some' | 'only' | 'has' | 'has-not'
export type Combinator = 'union' | 'intersection'

export interface Atom {
  property: string
  operator: Operator
  operand: string
}

export interface DraftAssertion {
  atoms: Atom[]
  // combinators[i] joins atoms[i] and atoms[i+1]; intersection binds tighter
  combinators: Combinator[]
}

export function serializeAtom(atom: Atom): string {
  if (atom.operator === 'has-not') {
    return `${atom.property} has not ${atom.operand}`
  }
  return `${atom.property} ${atom.operator} ${atom.operand}`
}

export function serializeAssertion(draft: DraftAssertion): string {
  if (draft.atoms.length === 0) {
    throw new Error('cannot serialize an empty assertion')
  }
  if (draft.combinators.length !== draft.atoms.length - 1) {
    throw new Error('combinator count must be atom count minus one')
  }
  const parts = [serializeAtom(draft.atoms[0])]
  draft.combinators.forEach((combinator, i) => {
    parts.push(combinator, serializeAtom(draft.atoms[i + 1]))
  })
  return parts.join(' ')
}

export function serializeConcept(name: string, assertions: string[]): string {
  if (assertions.length === 0) {
    throw new Error('a concept needs at least one assertion')
  }
  const body = assertions.map((a) => `assert ${a};`).join(' ')
  return `concept ${name} { ${body} }`
}
