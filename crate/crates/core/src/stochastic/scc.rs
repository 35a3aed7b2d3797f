//! Iterative Tarjan strongly connected components over an adjacency
//! closure, shared by the chain and MDP analyses.

/// Computes the strongly connected components of the directed graph given
/// by `successors`, restricted to the states where `active` is true.
/// Components are returned in reverse topological order (sinks last is NOT
/// guaranteed; Tarjan emits them in reverse topological order, i.e. a
/// component is emitted only after all components it can reach).
pub fn strongly_connected_components(
    n: usize,
    active: &[bool],
    successors: impl Fn(usize) -> Vec<usize>,
) -> Vec<Vec<usize>> {
    #[derive(Clone)]
    struct NodeState {
        index: u32,
        lowlink: u32,
        on_stack: bool,
        visited: bool,
    }
    let mut nodes = vec![
        NodeState { index: 0, lowlink: 0, on_stack: false, visited: false };
        n
    ];
    let mut stack: Vec<usize> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut counter: u32 = 0;

    // Explicit DFS stack: (node, successor list, next successor position).
    let mut call_stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();

    for start in 0..n {
        if !active[start] || nodes[start].visited {
            continue;
        }
        nodes[start].visited = true;
        nodes[start].index = counter;
        nodes[start].lowlink = counter;
        counter += 1;
        nodes[start].on_stack = true;
        stack.push(start);
        let succ: Vec<usize> = successors(start).into_iter().filter(|&t| active[t]).collect();
        call_stack.push((start, succ, 0));

        while let Some(&mut (v, ref succ, ref mut pos)) = call_stack.last_mut() {
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if !nodes[w].visited {
                    nodes[w].visited = true;
                    nodes[w].index = counter;
                    nodes[w].lowlink = counter;
                    counter += 1;
                    nodes[w].on_stack = true;
                    stack.push(w);
                    let wsucc: Vec<usize> =
                        successors(w).into_iter().filter(|&t| active[t]).collect();
                    call_stack.push((w, wsucc, 0));
                } else if nodes[w].on_stack {
                    nodes[v].lowlink = nodes[v].lowlink.min(nodes[w].index);
                }
            } else {
                call_stack.pop();
                if let Some(&mut (parent, _, _)) = call_stack.last_mut() {
                    let low = nodes[v].lowlink;
                    nodes[parent].lowlink = nodes[parent].lowlink.min(low);
                }
                if nodes[v].lowlink == nodes[v].index {
                    let mut component = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        nodes[w].on_stack = false;
                        component.push(w);
                        if w == v {
                            break;
                        }
                    }
                    component.sort_unstable();
                    components.push(component);
                }
            }
        }
    }
    components
}
