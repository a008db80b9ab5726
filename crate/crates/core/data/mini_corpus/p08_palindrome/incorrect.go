package main

import "fmt"

func main() {
	var s string
	fmt.Scan(&s)
	ok := true
	for i, j := 0, len(s)-1; i < j; i, j = i+1, j-1 {
		if s[i] != s[j] {
			ok = false
		}
		break
	}
	if ok {
		fmt.Println("Yes")
	} else {
		fmt.Println("No")
	}
}
