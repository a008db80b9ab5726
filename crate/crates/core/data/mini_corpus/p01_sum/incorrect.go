package main

import "fmt"

func main() {
	var a, b int32
	fmt.Scan(&a, &b)
	// sum in the same width
	total := a + b
	fmt.Println(total)
}
